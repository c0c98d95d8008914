#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "docsynth/docqa.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/prompts.hpp"
#include "docsynth/text.hpp"

using namespace docsynth;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

LayoutDocument report_doc() {
  LayoutDocument d;
  d.page_width = 1000;
  d.page_height = 1200;
  Region body;
  body.kind = RegionKind::printed_text;
  body.bbox = {50, 50, 950, 400};
  body.lines = {{"2023年营业收入为128.5亿元", {60, 60, 600, 90}},
                {"同比增长12.5%", {60, 100, 400, 130}},
                {"净利润率为8.3%", {60, 140, 400, 170}}};
  d.regions.push_back(body);
  Region table;
  table.kind = RegionKind::table;
  table.bbox = {50, 450, 950, 700};
  table.lines = {{"产品甲 1200万元", {60, 460, 500, 490}}};
  d.regions.push_back(table);
  return d;
}

QaRecord doc_record(const std::string& q, const std::string& a,
                    const std::string& kind = "printed_text") {
  QaRecord r;
  r.image_ref = "page.png";
  r.conversations = {{"human", q}, {"gpt", a}};
  r.id = make_record_id(r.image_ref, q);
  r.category = Category::doc;
  r.language = Language::zh;
  r.task_type = kind;
  return r;
}

// replay gateway over a one-entry store built for this exact prompt
LlmGateway replay_gateway(const fs::path& store) {
  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  cfg.model = "fixture-model";
  return LlmGateway(cfg);
}

fs::path fresh_store(const std::string& name) {
  auto dir = fs::temp_directory_path() / "docsynth_docqa_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void store_response(const fs::path& store, const std::string& prompt,
                    const json& pairs) {
  ChatRequest req;
  req.tag = "docqa";
  req.user_text = prompt;
  std::ofstream out(store / (LlmGateway::replay_key(req) + ".json"));
  out << json{{"response", {{"text", "```json\n" + pairs.dump() + "\n```"},
                            {"prompt_tokens", 1},
                            {"completion_tokens", 1}}}}
             .dump();
}

}  // namespace

TEST_CASE("build_doc_prompt embeds the guideline text and the layout json") {
  std::string layout = serialize_layout(report_doc());
  std::string prompt = build_doc_prompt(layout, doc_qa_sample_template());
  CHECK(prompt.find("Instructions focus on the ability to extract information") !=
        std::string::npos);
  CHECK(prompt.find("printed text, tables, charts, printed formulas, seals") !=
        std::string::npos);
  CHECK(prompt.find("'Please ask', 'Please answer', and 'In the document'") !=
        std::string::npos);
  CHECK(prompt.find(layout) != std::string::npos);
  CHECK(prompt.find("{json_string}") == std::string::npos);
  CHECK(prompt.find("{template}") == std::string::npos);
  CHECK(prompt == build_doc_prompt(layout, doc_qa_sample_template()));
}

TEST_CASE("empty template example leaves the placeholder unfilled") {
  std::string layout = serialize_layout(report_doc());
  CHECK_THROWS_WITH_AS(build_doc_prompt(layout, json::array()),
                       doctest::Contains("{template}"), Error);
}

TEST_CASE("grounded answers validate; normalization bridges OCR spacing") {
  DocQaConfig cfg;
  auto doc = report_doc();
  std::string spliced = splice_text(doc);
  auto kinds = kinds_present(doc);

  auto v = validate_doc_qa(doc_record("营业收入是多少？", "128.5亿元"), spliced,
                           kinds, cfg);
  CHECK(v.ok);

  // whitespace inside the answer is stripped before matching
  v = validate_doc_qa(doc_record("增长率是多少？", "12.5 %"), spliced, kinds, cfg);
  CHECK(v.ok);

  // fullwidth digits fold to the ascii form present in the text
  v = validate_doc_qa(doc_record("净利润率是多少？", "８.３%"), spliced, kinds, cfg);
  CHECK(v.ok);
}

TEST_CASE("ungrounded answer rejected with the exact reason") {
  DocQaConfig cfg;
  auto doc = report_doc();
  auto v = validate_doc_qa(doc_record("审计机构是哪家？", "不存在的答案"),
                           splice_text(doc), kinds_present(doc), cfg);
  CHECK(!v.ok);
  REQUIRE(v.reasons.size() == 1);
  CHECK(v.reasons[0] == "answer not grounded");
}

TEST_CASE("banned prefix and banned layout word both fire") {
  DocQaConfig cfg;
  auto doc = report_doc();
  auto v = validate_doc_qa(doc_record("请问该表格第二列是什么？", "128.5亿元"),
                           splice_text(doc), kinds_present(doc), cfg);
  CHECK(!v.ok);
  bool has_prefix = false, has_word = false;
  for (const auto& r : v.reasons) {
    if (r.find("banned instruction prefix") != std::string::npos &&
        r.find("请问") != std::string::npos)
      has_prefix = true;
    if (r.find("layout structure wording") != std::string::npos &&
        r.find("表格") != std::string::npos)
      has_word = true;
  }
  CHECK(has_prefix);
  CHECK(has_word);
}

TEST_CASE("kind label must reference a present region kind") {
  DocQaConfig cfg;
  auto doc = report_doc();  // printed_text + table, no seal
  auto v = validate_doc_qa(doc_record("营业收入是多少？", "128.5亿元", "seal"),
                           splice_text(doc), kinds_present(doc), cfg);
  CHECK(!v.ok);
  CHECK(v.reasons[0] == "region kind not present: seal");
}

TEST_CASE("validation is order-independent and deterministic") {
  DocQaConfig cfg;
  auto doc = report_doc();
  std::string spliced = splice_text(doc);
  auto kinds = kinds_present(doc);
  std::vector<QaRecord> records = {
      doc_record("营业收入是多少？", "128.5亿元"),
      doc_record("审计机构？", "虚构答案"),
      doc_record("增长率？", "12.5%"),
  };
  std::vector<bool> first, second;
  for (const auto& r : records)
    first.push_back(validate_doc_qa(r, spliced, kinds, cfg).ok);
  for (auto it = records.rbegin(); it != records.rend(); ++it)
    second.insert(second.begin(), validate_doc_qa(*it, spliced, kinds, cfg).ok);
  CHECK(first == second);
}

TEST_CASE("generate_doc_qa: replay fixture flows through validation") {
  auto doc = report_doc();
  auto store = fresh_store("gen");
  std::string prompt =
      build_doc_prompt(serialize_layout(doc), doc_qa_sample_template());
  json pairs = json::array({
      json{{"human", "营业收入是多少？"}, {"gpt", "128.5亿元"}, {"kind", "printed_text"}},
      json{{"human", "同比增长率是多少？"}, {"gpt", "12.5%"}, {"kind", "printed_text"}},
      json{{"human", "产品甲的金额是多少？"}, {"gpt", "1200万元"}, {"kind", "table"}},
      json{{"human", "审计机构是哪家？"}, {"gpt", "未出现的机构"}, {"kind", "printed_text"}},
  });
  store_response(store, prompt, pairs);

  auto gw = replay_gateway(store);
  DocQaConfig cfg;
  DocBatch batch = generate_doc_qa(doc, "page.png", cfg, gw, 4242);
  REQUIRE(batch.records.size() == 4);
  int ok = 0, rejected = 0;
  for (const auto& r : batch.records) {
    CHECK(r.category == Category::doc);
    CHECK(r.language == Language::zh);
    CHECK(r.provenance.rng_seed == 4242);
    if (r.provenance.validated) ++ok;
    else {
      ++rejected;
      CHECK(r.provenance.rejection_reason == "answer not grounded");
    }
  }
  CHECK(ok == 3);
  CHECK(rejected == 1);
  CHECK(batch.under_filled);  // 3 survivors < min_pairs 5
}

TEST_CASE("generate_doc_qa: response without a fence propagates the error") {
  auto doc = report_doc();
  auto store = fresh_store("nofence");
  std::string prompt =
      build_doc_prompt(serialize_layout(doc), doc_qa_sample_template());
  ChatRequest req;
  req.tag = "docqa";
  req.user_text = prompt;
  std::ofstream(store / (LlmGateway::replay_key(req) + ".json"))
      << R"({"response":{"text":"no fence in sight"}})";
  auto gw = replay_gateway(store);
  DocQaConfig cfg;
  CHECK_THROWS_WITH_AS(generate_doc_qa(doc, "page.png", cfg, gw, 1),
                       doctest::Contains("no json fence"), Error);
}

TEST_CASE("coverage_report flags kinds without records") {
  auto doc = report_doc();  // printed_text + table
  auto kinds = kinds_present(doc);
  std::vector<QaRecord> records = {
      doc_record("q1？", "128.5亿元"),
      doc_record("q2？", "12.5%"),
      doc_record("q3？", "8.3%"),
  };
  for (auto& r : records) r.provenance.validated = true;
  auto report = coverage_report(records, kinds);
  CHECK(report.counts.at("printed_text") == 3);
  CHECK(report.counts.at("table") == 0);
  REQUIRE(report.gaps.size() == 1);
  CHECK(report.gaps[0] == "table");

  CHECK(coverage_report({}, {}).counts.empty());
  CHECK(coverage_report({}, {}).gaps.empty());

  records.push_back(doc_record("q4？", "1200万元", "table"));
  auto full = coverage_report(records, kinds);
  CHECK(full.gaps.empty());
}
