#include "docsynth/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

namespace {

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::map<std::string, std::vector<IniEntry>> parse_ini(const std::string& ini) {
  std::map<std::string, std::vector<IniEntry>> sections;
  std::istringstream in(ini);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = text::trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      sections.try_emplace(section);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    IniEntry e;
    e.key = text::trim(t.substr(0, eq));
    e.value = text::trim(t.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    sections[section].push_back(std::move(e));
  }
  return sections;
}

int to_int(const IniEntry& e, const std::string& path) {
  try {
    size_t used = 0;
    int v = std::stoi(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path + ": not an integer: \"" + e.value + "\"");
  }
}

double to_double(const IniEntry& e, const std::string& path) {
  try {
    size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path + ": not a number: \"" + e.value + "\"");
  }
}

bool to_bool(const IniEntry& e, const std::string& path) {
  std::string v = text::to_lower_ascii(e.value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(path + ": not a boolean: \"" + e.value + "\"");
}

std::vector<std::string> to_list(const IniEntry& e) {
  std::vector<std::string> out;
  for (auto& part : text::split(e.value, ',')) {
    std::string t = text::trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

using Setter = std::function<void(const IniEntry&, const std::string& path)>;

void apply_section(const std::map<std::string, std::vector<IniEntry>>& sections,
                   const std::string& name,
                   const std::map<std::string, Setter>& setters) {
  auto it = sections.find(name);
  if (it == sections.end()) return;
  for (const auto& e : it->second) {
    const std::string path = name + "." + e.key;
    auto s = setters.find(e.key);
    if (s == setters.end()) throw ConfigError("unknown key: " + path);
    s->second(e, path);
  }
}

}  // namespace

PipelineConfig parse_config(const std::string& ini_text) {
  auto sections = parse_ini(ini_text);
  PipelineConfig cfg;
  cfg.config_hash = text::sha256_hex(ini_text);

  static const std::set<std::string> known_sections = {
      "gateway", "docqa", "chart", "table", "preprocess", "mix", "augment", "run"};
  for (const auto& [name, _] : sections)
    if (!known_sections.count(name)) throw ConfigError("unknown section: [" + name + "]");

  apply_section(sections, "gateway", {
      {"endpoint", [&](const IniEntry& e, const std::string&) { cfg.gateway.endpoint = e.value; }},
      {"model", [&](const IniEntry& e, const std::string&) { cfg.gateway.model = e.value; }},
      {"max_retries", [&](const IniEntry& e, const std::string& p) { cfg.gateway.max_retries = to_int(e, p); }},
      {"max_inflight", [&](const IniEntry& e, const std::string& p) { cfg.gateway.max_inflight = to_int(e, p); }},
      {"mode", [&](const IniEntry& e, const std::string&) { cfg.gateway.mode = gateway_mode_from_string(e.value); }},
      {"replay_store", [&](const IniEntry& e, const std::string&) { cfg.gateway.replay_store = e.value; }},
      {"retry_backoff_ms", [&](const IniEntry& e, const std::string& p) { cfg.gateway.retry_backoff_ms = to_int(e, p); }},
      {"api_key_env", [&](const IniEntry& e, const std::string&) { cfg.gateway.api_key_env = e.value; }},
      {"temperature", [&](const IniEntry& e, const std::string& p) { cfg.gateway.temperature = to_double(e, p); }},
      {"max_output_tokens", [&](const IniEntry& e, const std::string& p) { cfg.gateway.max_output_tokens = to_int(e, p); }},
  });

  apply_section(sections, "docqa", {
      {"min_pairs", [&](const IniEntry& e, const std::string& p) { cfg.docqa.min_pairs = to_int(e, p); }},
      {"banned_prefixes", [&](const IniEntry& e, const std::string&) { cfg.docqa.banned_instruction_prefixes = to_list(e); }},
      {"banned_layout_words", [&](const IniEntry& e, const std::string&) { cfg.docqa.banned_layout_words = to_list(e); }},
      {"strip_punctuation", [&](const IniEntry& e, const std::string&) { cfg.docqa.strip_punctuation = to_list(e); }},
  });

  apply_section(sections, "chart", {
      {"topic_pool", [&](const IniEntry& e, const std::string&) { cfg.chart.topic_pool = to_list(e); }},
      {"count", [&](const IniEntry& e, const std::string& p) { cfg.chart.count = to_int(e, p); }},
      {"tasks_bar", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::bar] = to_list(e); }},
      {"tasks_line", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::line] = to_list(e); }},
      {"tasks_pie", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::pie] = to_list(e); }},
      {"tasks_area", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::area] = to_list(e); }},
      {"tasks_scatter", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::scatter] = to_list(e); }},
      {"tasks_stacked_bar", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::stacked_bar] = to_list(e); }},
      {"tasks_histogram", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::histogram] = to_list(e); }},
      {"tasks_box", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::box] = to_list(e); }},
      {"tasks_heatmap", [&](const IniEntry& e, const std::string&) { cfg.chart.task_matrix.allowed[ChartType::heatmap] = to_list(e); }},
  });

  apply_section(sections, "table", {
      // reserved; the table pipeline currently has no tunables
  });

  apply_section(sections, "preprocess", {
      {"patch_px", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.patch_px = to_int(e, p); }},
      {"train_threshold_min", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.train_threshold_min = to_int(e, p); }},
      {"train_threshold_max", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.train_threshold_max = to_int(e, p); }},
      {"infer_upscale_min", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.infer_upscale_min = to_double(e, p); }},
      {"infer_upscale_max", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.infer_upscale_max = to_double(e, p); }},
      {"low_res_cutoff", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.low_res_cutoff = to_int(e, p); }},
      {"max_tokens", [&](const IniEntry& e, const std::string& p) { cfg.preprocess.max_tokens = to_int(e, p); }},
  });

  apply_section(sections, "mix", {
      {"default_synthetic_fraction", [&](const IniEntry& e, const std::string& p) { cfg.mix.default_synthetic_fraction = to_double(e, p); }},
  });

  apply_section(sections, "augment", {
      {"max_ocr_chars", [&](const IniEntry& e, const std::string& p) { cfg.augment.max_ocr_chars = to_int(e, p); }},
      {"min_mean_confidence", [&](const IniEntry& e, const std::string& p) { cfg.augment.min_mean_confidence = to_double(e, p); }},
      {"always", [&](const IniEntry& e, const std::string& p) { cfg.augment.always = to_bool(e, p); }},
      {"never", [&](const IniEntry& e, const std::string& p) { cfg.augment.never = to_bool(e, p); }},
  });

  apply_section(sections, "run", {
      {"workers", [&](const IniEntry& e, const std::string& p) { cfg.run.workers = to_int(e, p); }},
  });

  try {
    validate_config(cfg.docqa);
    validate_policy(cfg.preprocess);
    validate_policy(cfg.augment);
    validate_matrix(cfg.chart.task_matrix);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.run.workers < 1) throw ConfigError("run.workers must be >= 1");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string default_config_ini() {
  return
      "[gateway]\n"
      "endpoint = http://127.0.0.1:8000/v1/chat/completions\n"
      "model = chat-model\n"
      "max_retries = 3\n"
      "max_inflight = 4\n"
      "mode = replay\n"
      "replay_store = fixtures/replay\n"
      "\n"
      "[docqa]\n"
      "min_pairs = 5\n"
      "\n"
      "[chart]\n"
      "topic_pool = Art & Design, Science & Nature\n"
      "count = 10\n"
      "\n"
      "[preprocess]\n"
      "patch_px = 28\n"
      "train_threshold_min = 512\n"
      "train_threshold_max = 768\n"
      "infer_upscale_min = 1.1\n"
      "infer_upscale_max = 1.3\n"
      "low_res_cutoff = 448\n"
      "\n"
      "[mix]\n"
      "default_synthetic_fraction = 0.12\n"
      "\n"
      "[augment]\n"
      "max_ocr_chars = 2000\n"
      "min_mean_confidence = 0.9\n"
      "\n"
      "[run]\n"
      "workers = 1\n";
}

}  // namespace docsynth
