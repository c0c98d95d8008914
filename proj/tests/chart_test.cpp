#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "docsynth/chart.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/text.hpp"
#include "support/oracles.hpp"

using namespace docsynth;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ChartSeed bar_seed() {
  ChartSeed s;
  s.id = "bar";
  s.script_text = "plt.bar(...)";
  s.data_table = "category,Amount\nNorth,120\nSouth,86\nEast,143\nWest,97\n";
  s.chart_type = ChartType::bar;
  return s;
}

const std::vector<std::string> kTopics = {"Art & Design", "Science & Nature"};

ChartSpec tiny_bar_spec() {
  ChartSpec spec;
  spec.chart_type = ChartType::bar;
  spec.title = "标题";
  spec.categories = {"一", "二", "三"};
  spec.series = {{"甲", {3, 7, 5}}, {"乙", {2, 4, 6}}, {"丙", {9, 1, 8}}};
  spec.colors = {"#336699", "#CC4455", "#22AA66"};
  spec.locale = Language::zh;
  return spec;
}

}  // namespace

TEST_CASE("rule-based mutation is a pure function of (seed, pool, rng_seed)") {
  auto a = mutate_spec(bar_seed(), kTopics, 12345, MutateVia::rule_based);
  auto b = mutate_spec(bar_seed(), kTopics, 12345, MutateVia::rule_based);
  CHECK(a.spec == b.spec);
  CHECK(a.table_csv == b.table_csv);
  auto c = mutate_spec(bar_seed(), kTopics, 54321, MutateVia::rule_based);
  CHECK(a.table_csv != c.table_csv);
}

TEST_CASE("mutated colors always match the hex form") {
  std::regex hex("^#[0-9A-Fa-f]{6}$");
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto mut = mutate_spec(bar_seed(), kTopics, seed, MutateVia::rule_based);
    for (const auto& c : mut.spec.colors) CHECK(std::regex_match(c, hex));
  }
}

TEST_CASE("emitted table equals the spec series exactly") {
  for (uint64_t seed : {1ULL, 9ULL, 77ULL}) {
    auto mut = mutate_spec(bar_seed(), kTopics, seed, MutateVia::rule_based);
    CsvTable table = parse_csv(mut.table_csv);
    ChartSpec rebuilt = mut.spec;
    series_from_table(rebuilt, table);
    CHECK(rebuilt.series == mut.spec.series);
    CHECK(rebuilt.categories == mut.spec.categories);
  }
}

TEST_CASE("mutation localizes visible strings") {
  auto mut = mutate_spec(bar_seed(), kTopics, 3, MutateVia::rule_based);
  CHECK(mut.spec.locale == Language::zh);
  CHECK(text::contains_cjk(mut.spec.title));
  CHECK(text::contains_cjk(mut.spec.x_label));
}

TEST_CASE("extract_fenced_table basics") {
  auto t = extract_fenced_table("before ```\na,b\n1,2\n``` after");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("fence label words are stripped before csv parsing") {
  auto t = extract_fenced_table("```csv\nx,y\n3,4\n5,6\n```");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  CHECK(t.rows.size() == 2);
  auto t2 = extract_fenced_table("```plaintext\nx,y\n7,8\n```");
  CHECK(t2.rows.size() == 1);
}

TEST_CASE("no parsable table block is an error") {
  CHECK_THROWS_WITH_AS(extract_fenced_table("nothing fenced"),
                       doctest::Contains("no fenced table"), Error);
}

TEST_CASE("render determinism, byte for byte") {
  auto mut = mutate_spec(bar_seed(), kTopics, 5, MutateVia::rule_based);
  CHECK(render(mut.spec, 5) == render(mut.spec, 5));
  CHECK(render(mut.spec, 5) != render(mut.spec, 6));  // seed is part of output
}

TEST_CASE("three series produce three legend entries") {
  auto spec = tiny_bar_spec();
  std::string svg = render(spec, 1);
  for (const char* label : {"甲", "乙", "丙"})
    CHECK(svg.find(">" + std::string(label) + "</text>") != std::string::npos);
  size_t legend = svg.find("<g id=\"legend\">");
  REQUIRE(legend != std::string::npos);
}

TEST_CASE("degenerate bar chart with a zero value renders") {
  ChartSpec spec;
  spec.chart_type = ChartType::bar;
  spec.categories = {"only"};
  spec.series = {{"v", {0.0}}};
  spec.colors = {"#808080"};
  std::string svg = render(spec, 0);
  CHECK(svg.find("<svg ") != std::string::npos);
  CHECK(lint_layout(spec, svg).empty());
}

TEST_CASE("every chart type renders and lints clean under rule mutation") {
  struct Case {
    const char* csv;
    ChartType type;
  };
  const Case cases[] = {
      {"category,Amount\nNorth,120\nSouth,86\nEast,143\n", ChartType::bar},
      {"category,Series A,Series B\nQ1,42,31\nQ2,55,38\nQ3,61,45\n", ChartType::line},
      {"category,Share\nNorth,34\nSouth,22\nEast,28\n", ChartType::pie},
      {"category,Value\nQ1,18\nQ2,26\nQ3,31\n", ChartType::area},
      {"x,Value\n1,4.5\n2,6.1\n3,5.2\n4,8.4\n", ChartType::scatter},
      {"category,Series A,Series B\nQ1,12,9\nQ2,15,11\n", ChartType::stacked_bar},
      {"category,Count\n0-10,3\n10-20,8\n20-30,14\n", ChartType::histogram},
      {"category,min,q1,median,q3,max\nGroup,2,4,6,8,11\n", ChartType::box},
      {"category,North,South\nQ1,4,7\nQ2,6,3\n", ChartType::heatmap},
  };
  for (const auto& c : cases) {
    ChartSeed seed;
    seed.id = to_string(c.type);
    seed.script_text = "code";
    seed.data_table = c.csv;
    seed.chart_type = c.type;
    for (uint64_t s = 0; s < 4; ++s) {
      auto mut = mutate_spec(seed, kTopics, s, MutateVia::rule_based);
      std::string svg = render(mut.spec, s);
      auto diags = lint_layout(mut.spec, svg);
      CHECK_MESSAGE(diags.empty(),
                    to_string(c.type) << " seed " << s << ": "
                                      << text::join(diags, "; "));
    }
  }
}

TEST_CASE("lint flags an annotation anchored past the canvas") {
  auto spec = tiny_bar_spec();
  spec.annotations.push_back({"出界注释", 1.05, 0.5});
  std::string svg = render(spec, 2);
  auto diags = lint_layout(spec, svg);
  bool found = false;
  for (const auto& d : diags)
    if (d.find("text out of bounds") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("lint flags a legend shoved onto the title") {
  auto spec = tiny_bar_spec();
  spec.title = "非常非常非常长的标题文本占据中间";
  spec.legend_position = LegendPosition::top_center;
  std::string svg = render(spec, 3);
  auto diags = lint_layout(spec, svg);
  bool found = false;
  for (const auto& d : diags)
    if (d.find("legend overlaps title") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("well-placed spec lints clean") {
  auto spec = tiny_bar_spec();
  CHECK(lint_layout(spec, render(spec, 4)).empty());
}

TEST_CASE("task matrix: every type has at least one task") {
  auto matrix = TaskMatrix::defaults();
  validate_matrix(matrix);
  for (ChartType t : all_chart_types()) CHECK(!matrix.tasks_for(t).empty());
  TaskMatrix broken = matrix;
  broken.allowed.erase(ChartType::pie);
  CHECK_THROWS_AS(validate_matrix(broken), Error);
}

TEST_CASE("verify: extremum over the single column") {
  CsvTable table;
  table.header = {"category", "v"};
  table.rows = {{"a", "3"}, {"b", "7"}, {"c", "5"}};
  QaRecord r;
  r.category = Category::chart;
  r.task_type = "extremum_max";
  r.conversations = {{"human", "最大值？"}, {"gpt", "7"}};
  auto res = verify_chart_answer(r, table);
  CHECK(res.verdict == Verdict::verified);

  r.conversations.back().text = "5";
  res = verify_chart_answer(r, table);
  CHECK(res.verdict == Verdict::wrong);
  CHECK(res.expected == "7");
}

TEST_CASE("verify: explanation-style tasks are unverifiable") {
  CsvTable table;
  table.header = {"category", "v"};
  table.rows = {{"a", "3"}};
  QaRecord r;
  r.category = Category::chart;
  r.task_type = "description";
  r.conversations = {{"human", "说明？"}, {"gpt", "一段自由描述"}};
  CHECK(verify_chart_answer(r, table).verdict == Verdict::unverifiable);
  r.task_type = "trend";
  CHECK(verify_chart_answer(r, table).verdict == Verdict::unverifiable);
}

TEST_CASE("verify answers with units and percent signs") {
  CsvTable table;
  table.header = {"category", "份额"};
  table.rows = {{"甲", "34"}, {"乙", "22"}};
  QaRecord r;
  r.category = Category::chart;
  r.task_type = "value_lookup";
  r.conversations = {{"human", "甲的份额？"}, {"gpt", "34%"}};
  CHECK(verify_chart_answer(r, table).verdict == Verdict::verified);
  r.conversations.back().text = "甲的份额是34";
  CHECK(verify_chart_answer(r, table).verdict == Verdict::verified);
}

TEST_CASE("template QA agrees with the naive oracle on every mutation") {
  auto matrix = TaskMatrix::defaults();
  for (uint64_t seed = 0; seed < 25; ++seed) {
    auto mut = mutate_spec(bar_seed(), kTopics, seed, MutateVia::rule_based);
    CsvTable table = parse_csv(mut.table_csv);
    auto records = template_chart_qa(mut.spec, table, matrix, seed, "img.svg");
    CHECK(!records.empty());
    for (const auto& r : records) {
      CHECK(r.provenance.validated);  // template answers are true by build
      auto mine = verify_chart_answer(r, table);
      auto oracle = oracles::check_chart_answer(
          r.task_type, r.conversations.back().text, mut.table_csv);
      if (mine.verdict == Verdict::unverifiable) {
        CHECK(oracle == oracles::OracleVerdict::unverifiable);
      } else {
        CHECK(mine.verdict == Verdict::verified);
        CHECK(oracle == oracles::OracleVerdict::verified);
      }
    }
  }
}

TEST_CASE("llm mutation path: replay fixture yields spec plus matching table") {
  ChartSeed area;
  area.id = "area";
  area.script_text = "plt.fill_between(...)";
  area.data_table = "category,Value\nQ1,18\nQ2,26\n";
  area.chart_type = ChartType::area;

  auto store = fs::temp_directory_path() / "docsynth_chart_test" / "mutllm";
  fs::remove_all(store);
  fs::create_directories(store);

  std::string prompt = build_chart_image_prompt(area, kTopics);
  CHECK(prompt.find("Generate only an area chart with one column of value") !=
        std::string::npos);
  CHECK(prompt.find(area.script_text) != std::string::npos);

  json spec_json{{"chart_type", "area"},
                 {"title", "科技主题 概览"},
                 {"topic", "科技"},
                 {"width_px", 900},
                 {"height_px", 560},
                 {"colors", {"#4C72B0"}},
                 {"x_label", "月份"},
                 {"y_label", "数值"},
                 {"locale", "zh"},
                 {"legend_position", "top_right"}};
  std::string response = "数据表：\n```\ncategory,数值\n一月,10.5\n二月,14\n三月,12.25\n```\n"
                         "规格：\n```json\n" + spec_json.dump() + "\n```\n";
  ChatRequest req;
  req.tag = "chartmut";
  req.user_text = prompt;
  std::ofstream(store / (LlmGateway::replay_key(req) + ".json"))
      << json{{"response", {{"text", response}}}}.dump();

  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  LlmGateway gw(cfg);
  auto mut = mutate_spec(area, kTopics, 0, MutateVia::llm, &gw);
  CHECK(mut.spec.chart_type == ChartType::area);
  REQUIRE(mut.spec.series.size() == 1);
  CHECK(mut.spec.series[0].values == std::vector<double>{10.5, 14.0, 12.25});
  CsvTable back = parse_csv(mut.table_csv);
  CHECK(back.rows.size() == 3);
  CHECK(back.rows[0][1] == "10.5");
}

TEST_CASE("llm chart QA: records tagged within the matrix, wrong answers rejected") {
  auto mut = mutate_spec(bar_seed(), kTopics, 7, MutateVia::rule_based);
  CsvTable table = parse_csv(mut.table_csv);
  auto matrix = TaskMatrix::defaults();

  auto store = fs::temp_directory_path() / "docsynth_chart_test" / "qallm";
  fs::remove_all(store);
  fs::create_directories(store);

  std::string prompt = build_chart_qa_prompt(mut.spec, table, matrix);
  double a0 = *text::parse_number(table.rows[0][1]);
  json pairs = json::array({
      json{{"human", "第一个类别的数值？"}, {"gpt", text::format_double(a0)},
           {"task_type", "value_lookup"}},
      json{{"human", "总和？"}, {"gpt", "99999999"}, {"task_type", "sum"}},
      json{{"human", "走势？"}, {"gpt", "平稳"}, {"task_type", "trend"}},
  });
  ChatRequest req;
  req.tag = "chartqa";
  req.user_text = prompt;
  std::ofstream(store / (LlmGateway::replay_key(req) + ".json"))
      << json{{"response", {{"text", "```json\n" + pairs.dump() + "\n```"}}}}.dump();

  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  LlmGateway gw(cfg);
  auto records = gen_chart_qa(mut.spec, table, matrix, gw, "img.svg");
  REQUIRE(records.size() == 3);
  CHECK(records[0].provenance.validated);
  CHECK(records[0].task_type == "value_lookup");
  CHECK(!records[1].provenance.validated);
  CHECK(records[1].provenance.rejection_reason.find("wrong answer") !=
        std::string::npos);
  // trend is not an allowed bar task in the default matrix
  CHECK(!records[2].provenance.validated);
  CHECK(records[2].provenance.rejection_reason.find("task type not allowed") !=
        std::string::npos);
}

TEST_CASE("spec validation rejects malformed charts") {
  ChartSpec spec = tiny_bar_spec();
  spec.colors[0] = "#33669";  // five digits
  CHECK_THROWS_AS(validate_spec(spec), Error);
  spec = tiny_bar_spec();
  spec.series[1].values.pop_back();
  CHECK_THROWS_AS(validate_spec(spec), Error);
  spec = tiny_bar_spec();
  spec.series.clear();
  CHECK_THROWS_AS(validate_spec(spec), Error);
  spec = tiny_bar_spec();
  spec.chart_type = ChartType::area;  // area wants one series
  CHECK_THROWS_AS(validate_spec(spec), Error);
}

TEST_CASE("spec json round trip") {
  auto mut = mutate_spec(bar_seed(), kTopics, 21, MutateVia::rule_based);
  auto back = spec_from_json(json::parse(spec_to_json(mut.spec).dump()));
  CHECK(back == mut.spec);
}
