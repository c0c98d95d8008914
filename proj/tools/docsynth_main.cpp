// docsynth: one binary per pipeline stage. Exit codes: 0 success,
// 1 pipeline failure, 2 configuration error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "docsynth/augment.hpp"
#include "docsynth/chart.hpp"
#include "docsynth/config.hpp"
#include "docsynth/corpus.hpp"
#include "docsynth/docqa.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/mix.hpp"
#include "docsynth/preprocess.hpp"
#include "docsynth/report.hpp"
#include "docsynth/tableqa.hpp"
#include "docsynth/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace docsynth;

namespace {

uint64_t derive_seed(uint64_t master, const std::string& item) {
  std::string digest =
      text::sha256_hex(std::to_string(master) + "\x1f" + item).substr(0, 16);
  return std::stoull(digest, nullptr, 16);
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fan work items out to a bounded pool; outputs are canonicalized by the
// caller so results do not depend on scheduling.
template <class Item, class Fn>
void run_parallel(const std::vector<Item>& items, int workers, Fn fn) {
  if (workers <= 1) {
    for (size_t i = 0; i < items.size(); ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;
  auto body = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void sort_by_id(std::vector<QaRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const QaRecord& a, const QaRecord& b) { return a.id < b.id; });
}

struct SplitOutput {
  std::vector<QaRecord> accepted;
  std::vector<QaRecord> rejected;
};

SplitOutput split_validated(std::vector<QaRecord> records) {
  SplitOutput out;
  for (auto& r : records)
    (r.provenance.validated ? out.accepted : out.rejected).push_back(std::move(r));
  sort_by_id(out.accepted);
  sort_by_id(out.rejected);
  return out;
}

fs::path rejects_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".rejects.jsonl");
  return p;
}

void finish_report(RunReport& report, const fs::path& report_path,
                   std::chrono::steady_clock::time_point started) {
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  write_report(report, report_path);
}

int cmd_gen_doc(const fs::path& layout_dir, const fs::path& out,
                const fs::path& config_path, const std::string& mode_override,
                uint64_t seed, const fs::path& report_path) {
  auto started = std::chrono::steady_clock::now();
  PipelineConfig cfg = config_path.empty() ? parse_config(default_config_ini())
                                           : load_config(config_path);
  if (!mode_override.empty())
    cfg.gateway.mode = gateway_mode_from_string(mode_override);
  LlmGateway gateway(cfg.gateway);

  auto files = sorted_files(layout_dir, ".json");
  std::vector<QaRecord> all;
  std::mutex mu;
  size_t under_filled = 0;
  run_parallel(files, cfg.run.workers, [&](size_t i) {
    LayoutDocument doc = parse_layout(slurp(files[i]));
    std::string image_ref = files[i].stem().string() + ".png";
    DocBatch batch = generate_doc_qa(doc, image_ref, cfg.docqa, gateway,
                                     derive_seed(seed, image_ref));
    std::lock_guard<std::mutex> lock(mu);
    if (batch.under_filled) ++under_filled;
    for (auto& r : batch.records) all.push_back(std::move(r));
  });

  auto split = split_validated(std::move(all));
  write_jsonl(split.accepted, out);
  write_jsonl(split.rejected, rejects_path(out));

  RunReport report;
  PipelineCounts counts;
  counts.generated = split.accepted.size() + split.rejected.size();
  counts.validated = split.accepted.size();
  counts.under_filled_batches = under_filled;
  for (const auto& r : split.rejected)
    ++counts.rejected_by_reason[r.provenance.rejection_reason];
  report.pipelines["docqa"] = counts;
  report.token_usage = gateway.total_usage();
  report.output_paths = {out.string(), rejects_path(out).string()};
  report.config_hash = cfg.config_hash;
  finish_report(report, report_path.empty() ? fs::path(out.string() + ".report.json")
                                            : report_path,
                started);
  std::cout << "doc records: " << split.accepted.size() << " validated, "
            << split.rejected.size() << " rejected\n";
  return 0;
}

ChartSeed load_seed(const fs::path& dir) {
  ChartSeed seed;
  seed.id = dir.filename().string();
  seed.script_text = slurp(dir / "script.txt");
  seed.data_table = slurp(dir / "table.csv");
  json meta = json::parse(slurp(dir / "meta.json"));
  auto type = chart_type_from_string(meta.at("chart_type").get<std::string>());
  if (!type) throw Error(dir.string() + ": unknown chart_type in meta.json");
  seed.chart_type = *type;
  return seed;
}

int cmd_gen_chart(const fs::path& seeds_dir, const fs::path& out,
                  const fs::path& svg_dir, const fs::path& config_path,
                  const std::string& via, const std::string& mode_override,
                  std::vector<std::string> topics, int count_override,
                  uint64_t seed, const fs::path& report_path) {
  auto started = std::chrono::steady_clock::now();
  PipelineConfig cfg = config_path.empty() ? parse_config(default_config_ini())
                                           : load_config(config_path);
  if (!mode_override.empty())
    cfg.gateway.mode = gateway_mode_from_string(mode_override);
  if (count_override > 0) cfg.chart.count = count_override;
  if (topics.empty()) topics = cfg.chart.topic_pool;

  const bool llm = via == "llm";
  std::optional<LlmGateway> gateway;
  if (llm) gateway.emplace(cfg.gateway);

  if (!fs::is_directory(seeds_dir)) throw Error("not a directory: " + seeds_dir.string());
  std::vector<fs::path> seed_dirs;
  for (const auto& entry : fs::directory_iterator(seeds_dir))
    if (entry.is_directory()) seed_dirs.push_back(entry.path());
  std::sort(seed_dirs.begin(), seed_dirs.end());
  if (seed_dirs.empty()) throw Error("no seed directories under " + seeds_dir.string());

  if (!svg_dir.empty()) fs::create_directories(svg_dir);

  std::vector<QaRecord> all;
  std::mutex mu;
  size_t lint_failures = 0;
  std::vector<std::pair<fs::path, ChartSeed>> work;
  for (const auto& dir : seed_dirs) work.emplace_back(dir, load_seed(dir));

  run_parallel(work, cfg.run.workers, [&](size_t wi) {
    const ChartSeed& chart_seed = work[wi].second;
    for (int k = 0; k < cfg.chart.count; ++k) {
      const std::string item = chart_seed.id + "#" + std::to_string(k);
      uint64_t item_seed = derive_seed(seed, item);
      MutationResult mut =
          mutate_spec(chart_seed, topics, item_seed,
                      llm ? MutateVia::llm : MutateVia::rule_based,
                      gateway ? &*gateway : nullptr);
      std::string svg = render(mut.spec, item_seed);
      auto diagnostics = lint_layout(mut.spec, svg);
      std::string image_ref = chart_seed.id + "_" + std::to_string(k) + ".svg";
      if (!svg_dir.empty()) {
        std::ofstream f(svg_dir / image_ref, std::ios::binary | std::ios::trunc);
        f << svg;
      }
      std::vector<QaRecord> records;
      CsvTable table = parse_csv(mut.table_csv);
      if (llm) {
        records = gen_chart_qa(mut.spec, table, cfg.chart.task_matrix, *gateway,
                               image_ref);
        for (auto& r : records) r.provenance.rng_seed = item_seed;
      } else {
        records = template_chart_qa(mut.spec, table, cfg.chart.task_matrix,
                                    item_seed, image_ref);
      }
      if (!diagnostics.empty())
        for (auto& r : records) {
          r.provenance.validated = false;
          r.provenance.rejection_reason = "lint: " + text::join(diagnostics, "; ");
        }
      std::lock_guard<std::mutex> lock(mu);
      if (!diagnostics.empty()) ++lint_failures;
      for (auto& r : records) all.push_back(std::move(r));
    }
  });

  auto split = split_validated(std::move(all));
  write_jsonl(split.accepted, out);
  write_jsonl(split.rejected, rejects_path(out));

  RunReport report;
  PipelineCounts counts;
  counts.generated = split.accepted.size() + split.rejected.size();
  counts.validated = split.accepted.size();
  for (const auto& r : split.rejected)
    ++counts.rejected_by_reason[r.provenance.rejection_reason];
  report.pipelines["chart"] = counts;
  if (gateway) report.token_usage = gateway->total_usage();
  report.output_paths = {out.string(), rejects_path(out).string()};
  report.config_hash = cfg.config_hash;
  finish_report(report, report_path.empty() ? fs::path(out.string() + ".report.json")
                                            : report_path,
                started);
  std::cout << "chart records: " << split.accepted.size() << " validated, "
            << split.rejected.size() << " rejected, lint failures "
            << lint_failures << "\n";
  return 0;
}

int cmd_gen_table(const fs::path& html_dir, const fs::path& out,
                  const fs::path& config_path, const std::string& mode_override,
                  uint64_t seed, const fs::path& report_path) {
  auto started = std::chrono::steady_clock::now();
  PipelineConfig cfg = config_path.empty() ? parse_config(default_config_ini())
                                           : load_config(config_path);
  if (!mode_override.empty())
    cfg.gateway.mode = gateway_mode_from_string(mode_override);
  LlmGateway gateway(cfg.gateway);

  auto files = sorted_files(html_dir, ".html");
  std::vector<QaRecord> all;
  std::mutex mu;
  size_t under_filled = 0;
  run_parallel(files, cfg.run.workers, [&](size_t i) {
    std::string html = slurp(files[i]);
    std::string image_ref = files[i].stem().string() + ".png";
    TableBatch batch = gen_table_qa(html, gateway, image_ref);
    for (auto& r : batch.records) r.provenance.rng_seed = derive_seed(seed, image_ref);
    std::lock_guard<std::mutex> lock(mu);
    if (batch.under_filled) ++under_filled;
    for (auto& r : batch.records) all.push_back(std::move(r));
  });

  auto split = split_validated(std::move(all));
  write_jsonl(split.accepted, out);
  write_jsonl(split.rejected, rejects_path(out));

  RunReport report;
  PipelineCounts counts;
  counts.generated = split.accepted.size() + split.rejected.size();
  counts.validated = split.accepted.size();
  counts.under_filled_batches = under_filled;
  for (const auto& r : split.rejected)
    ++counts.rejected_by_reason[r.provenance.rejection_reason];
  report.pipelines["table"] = counts;
  report.token_usage = gateway.total_usage();
  report.output_paths = {out.string(), rejects_path(out).string()};
  report.config_hash = cfg.config_hash;
  finish_report(report, report_path.empty() ? fs::path(out.string() + ".report.json")
                                            : report_path,
                started);
  std::cout << "table records: " << split.accepted.size() << " validated, "
            << split.rejected.size() << " rejected\n";
  return 0;
}

int cmd_validate(const fs::path& in) {
  auto records = read_jsonl(in);
  size_t bad = 0;
  std::set<std::string> ids;
  for (const auto& r : records) {
    auto violations = validate_record(r);
    if (!ids.insert(r.id).second) violations.push_back("duplicate id in file");
    if (!violations.empty()) {
      ++bad;
      std::cout << r.id << ": " << text::join(violations, "; ") << "\n";
    }
  }
  std::cout << records.size() << " records, " << bad << " invalid\n";
  return bad == 0 ? 0 : 1;
}

int cmd_assemble(const std::vector<fs::path>& inputs, const fs::path& out,
                 const fs::path& manifest_path) {
  std::map<std::string, QaRecord> by_id;
  for (const auto& path : inputs) {
    for (auto& r : read_jsonl(path)) {
      const std::string id = r.id;
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        by_id.emplace(id, std::move(r));
      } else if (!(it->second == r)) {
        throw Error("conflicting records for id " + id + " (from " +
                    path.string() + ")");
      }
    }
  }
  std::vector<QaRecord> dataset;
  dataset.reserve(by_id.size());
  for (auto& [_, r] : by_id) dataset.push_back(std::move(r));  // map is id-sorted
  write_jsonl(dataset, out);
  ManifestStats stats = compute_manifest(dataset);
  std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
  if (!mf) throw Error("cannot write manifest: " + manifest_path.string());
  mf << manifest_to_json(stats).dump(2) << "\n";
  std::cout << "assembled " << dataset.size() << " records\n";
  return 0;
}

int cmd_sample(const fs::path& plan_path, uint64_t seed, const fs::path& out,
               bool emit_stats) {
  MixPlan plan = load_plan(plan_path);
  auto stream = sample_epoch(plan, seed);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write stream: " + out.string());
    for (const auto& ref : stream)
      f << ordered_json{{"source", plan.sources[ref.source].name},
                        {"index", ref.index}}
               .dump()
        << "\n";
  }
  if (emit_stats) {
    ordered_json weights = ordered_json::object();
    for (const auto& s : plan.sources) weights[s.name] = s.weight;
    ordered_json fractions = ordered_json::object();
    for (const auto& [name, f] : empirical_fractions(stream, plan))
      fractions[name] = f;
    std::cout << ordered_json{{"solved_weights", weights},
                              {"stream_length", stream.size()},
                              {"expected_synthetic_fraction",
                               expected_synthetic_fraction(plan)},
                              {"empirical_synthetic_fraction",
                               empirical_synthetic_fraction(stream, plan)},
                              {"empirical_fractions", fractions}}
                     .dump(2)
              << "\n";
  }
  return 0;
}

int cmd_preprocess(int w, int h, const std::string& mode, uint64_t seed,
                   int max_tokens) {
  ResizePolicy policy;
  if (max_tokens > 0) policy.max_tokens = max_tokens;
  ResizeMode m = mode == "train" ? ResizeMode::train : ResizeMode::infer;
  if (mode != "train" && mode != "infer")
    throw ConfigError("mode must be train or infer");
  auto [w2, h2] = smart_resize(w, h, policy, m, seed);
  std::cout << ordered_json{{"width", w2},
                            {"height", h2},
                            {"tokens", token_count(w2, h2, policy)},
                            {"class", classify_resolution(w, h, policy) ==
                                              ResolutionClass::low
                                          ? "low"
                                          : "conventional"}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_augment(const std::string& question, const fs::path& ocr_file,
                double confidence, bool force) {
  std::string ocr = slurp(ocr_file);
  AugmentPolicy policy;
  if (force || should_augment(ocr, confidence, policy))
    std::cout << augment_question(question, ocr) << "\n";
  else
    std::cout << question << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"document QA synthesis toolkit"};
  app.require_subcommand(1);

  // gen-doc
  auto* gen_doc = app.add_subcommand("gen-doc", "text-rich document QA from OCR layouts");
  fs::path gd_layout, gd_out, gd_config, gd_report;
  std::string gd_mode;
  uint64_t gd_seed = 0;
  gen_doc->add_option("--layout-dir", gd_layout, "directory of layout .json files")->required();
  gen_doc->add_option("--out", gd_out, "output dataset .jsonl")->required();
  gen_doc->add_option("--config", gd_config, "config .ini");
  gen_doc->add_option("--mode", gd_mode, "gateway mode override (live|record|replay)");
  gen_doc->add_option("--seed", gd_seed, "master rng seed");
  gen_doc->add_option("--report", gd_report, "run report path");

  // gen-chart
  auto* gen_chart = app.add_subcommand("gen-chart", "diversified charts plus QA");
  fs::path gc_seeds, gc_out, gc_svg, gc_config, gc_report;
  std::string gc_via = "rule", gc_mode;
  std::vector<std::string> gc_topics;
  int gc_count = 0;
  uint64_t gc_seed = 0;
  gen_chart->add_option("--seeds", gc_seeds, "seed corpus directory")->required();
  gen_chart->add_option("--out", gc_out, "output dataset .jsonl")->required();
  gen_chart->add_option("--svg-dir", gc_svg, "directory for rendered charts");
  gen_chart->add_option("--config", gc_config, "config .ini");
  gen_chart->add_option("--via", gc_via, "rule|llm")->check(CLI::IsMember({"rule", "llm"}));
  gen_chart->add_option("--mode", gc_mode, "gateway mode override");
  gen_chart->add_option("--topics", gc_topics, "topic pool override");
  gen_chart->add_option("--count", gc_count, "mutations per seed");
  gen_chart->add_option("--seed", gc_seed, "master rng seed");
  gen_chart->add_option("--report", gc_report, "run report path");

  // gen-table
  auto* gen_table = app.add_subcommand("gen-table", "table QA from HTML tables");
  fs::path gt_html, gt_out, gt_config, gt_report;
  std::string gt_mode;
  uint64_t gt_seed = 0;
  gen_table->add_option("--html-dir", gt_html, "directory of .html tables")->required();
  gen_table->add_option("--out", gt_out, "output dataset .jsonl")->required();
  gen_table->add_option("--config", gt_config, "config .ini");
  gen_table->add_option("--mode", gt_mode, "gateway mode override");
  gen_table->add_option("--seed", gt_seed, "master rng seed");
  gen_table->add_option("--report", gt_report, "run report path");

  // validate
  auto* validate = app.add_subcommand("validate", "check a dataset file");
  fs::path v_in;
  validate->add_option("--in", v_in, "dataset .jsonl")->required();

  // assemble
  auto* assemble = app.add_subcommand("assemble", "merge datasets and emit a manifest");
  std::vector<fs::path> as_inputs;
  fs::path as_out, as_manifest;
  assemble->add_option("inputs", as_inputs, "input .jsonl files")->required();
  assemble->add_option("--out", as_out, "merged dataset")->required();
  assemble->add_option("--manifest", as_manifest, "manifest .json")->required();

  // sample
  auto* sample = app.add_subcommand("sample", "epoch stream from a mix plan");
  fs::path s_plan, s_out;
  uint64_t s_seed = 0;
  bool s_stats = false;
  sample->add_option("--plan", s_plan, "plan .json")->required();
  sample->add_option("--seed", s_seed, "stream seed");
  sample->add_option("--out", s_out, "stream .jsonl");
  sample->add_flag("--emit-stats", s_stats, "print solved weights and fractions");

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "patch-aligned resize math");
  preprocess->set_help_flag("--help", "print help");  // frees --h for height
  int p_w = 0, p_h = 0, p_max_tokens = 0;
  std::string p_mode = "infer";
  uint64_t p_seed = 0;
  preprocess->add_option("--w", p_w, "input width")->required();
  preprocess->add_option("--h", p_h, "input height")->required();
  preprocess->add_option("--mode", p_mode, "train|infer");
  preprocess->add_option("--seed", p_seed, "rng seed");
  preprocess->add_option("--max-tokens", p_max_tokens, "visual token cap");

  // augment
  auto* augment = app.add_subcommand("augment", "prepend OCR context to a question");
  std::string a_question;
  fs::path a_ocr;
  double a_conf = 1.0;
  bool a_force = false;
  augment->add_option("--question", a_question, "the question")->required();
  augment->add_option("--ocr-file", a_ocr, "file with OCR text")->required();
  augment->add_option("--confidence", a_conf, "mean OCR confidence");
  augment->add_flag("--force", a_force, "skip the gate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage problems are configuration errors
  }

  try {
    if (*gen_doc)
      return cmd_gen_doc(gd_layout, gd_out, gd_config, gd_mode, gd_seed, gd_report);
    if (*gen_chart)
      return cmd_gen_chart(gc_seeds, gc_out, gc_svg, gc_config, gc_via, gc_mode,
                           gc_topics, gc_count, gc_seed, gc_report);
    if (*gen_table)
      return cmd_gen_table(gt_html, gt_out, gt_config, gt_mode, gt_seed, gt_report);
    if (*validate) return cmd_validate(v_in);
    if (*assemble) return cmd_assemble(as_inputs, as_out, as_manifest);
    if (*sample) return cmd_sample(s_plan, s_seed, s_out, s_stats);
    if (*preprocess) return cmd_preprocess(p_w, p_h, p_mode, p_seed, p_max_tokens);
    if (*augment) return cmd_augment(a_question, a_ocr, a_conf, a_force);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
