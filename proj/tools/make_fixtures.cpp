// Builds the deterministic fixture corpus used by the replay-mode tests
// and the CLI demos: OCR layouts, chart seeds, HTML tables, a mix plan,
// a replay store whose keys are derived from the exact prompt bytes, and
// a ready-to-use config file.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "docsynth/chart.hpp"
#include "docsynth/corpus.hpp"
#include "docsynth/docqa.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/tableqa.hpp"
#include "docsynth/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace docsynth;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string fmt(double v) { return text::format_double(v); }

void write_replay_entry(const fs::path& store, const std::string& tag,
                        const std::string& prompt, const std::string& response) {
  ChatRequest req;
  req.tag = tag;
  req.user_text = prompt;
  ordered_json j{{"request", ordered_json{{"tag", tag}, {"user_text", prompt}}},
                 {"response", ordered_json{{"text", response},
                                           {"prompt_tokens", (long long)prompt.size() / 4},
                                           {"completion_tokens",
                                            (long long)response.size() / 4}}}};
  write_file(store / (LlmGateway::replay_key(req) + ".json"), j.dump(2) + "\n");
}

std::string wrap_pairs(const json& pairs) {
  return "好的，以下是根据图像内容生成的问答对：\n```json\n" + pairs.dump(2) +
         "\n```\n";
}

// ---------------------------------------------------------------- layouts

struct DocFixture {
  LayoutDocument doc;
  json pairs = json::array();
};

DocFixture make_doc(int k) {
  const std::string quarter = std::to_string(k % 4 + 1);
  const std::string revenue = fmt((1005.0 + 70.0 * k) / 10.0);   // 100.5, 107.5...
  const std::string growth = fmt((50.0 + 13.0 * k) / 10.0);      // 5, 6.3, ...
  const std::string margin = fmt((80.0 + 4.0 * k) / 10.0);
  const std::string rnd = fmt((120.0 + 11.0 * k) / 10.0);
  const std::string sales_a = fmt(1200.0 + 15.0 * k);
  const std::string sales_b = fmt(860.0 + 12.0 * k);

  DocFixture f;
  f.doc.page_width = 1000;
  f.doc.page_height = 1400;

  Region body;
  body.kind = RegionKind::printed_text;
  body.bbox = {50, 50, 950, 420};
  double y = 60;
  auto add_line = [&](Region& r, const std::string& t, double x0, double x1) {
    r.lines.push_back({t, {x0, y, x1, y + 28}});
    y += 36;
  };
  add_line(body, "2023年第" + quarter + "季度财务摘要", 60, 560);
  add_line(body, "营业收入为" + revenue + "亿元", 60, 520);
  add_line(body, "同比增长" + growth + "%", 60, 420);
  add_line(body, "净利润率达到" + margin + "%", 60, 460);
  add_line(body, "研发投入为" + rnd + "亿元", 60, 500);
  f.doc.regions.push_back(body);

  if (k % 2 == 0) {
    Region table;
    table.kind = RegionKind::table;
    table.bbox = {50, 450, 950, 760};
    y = 460;
    add_line(table, "产品甲 销售额 " + sales_a + "万元", 60, 700);
    add_line(table, "产品乙 销售额 " + sales_b + "万元", 60, 700);
    f.doc.regions.push_back(table);
  }
  if (k % 3 == 0) {
    Region chart;
    chart.kind = RegionKind::chart;
    chart.bbox = {50, 800, 950, 1080};
    y = 810;
    add_line(chart, "图1 季度收入走势", 60, 380);
    f.doc.regions.push_back(chart);
  }
  if (k % 4 == 0) {
    Region formula;
    formula.kind = RegionKind::printed_formula;
    formula.bbox = {50, 1100, 520, 1200};
    y = 1110;
    add_line(formula, "ROE = 净利润 / 股东权益", 60, 500);
    f.doc.regions.push_back(formula);
  }
  if (k % 5 == 0) {
    Region seal;
    seal.kind = RegionKind::seal;
    seal.bbox = {700, 1150, 920, 1360};
    y = 1160;
    add_line(seal, "数据科技有限公司专用章", 704, 916);
    f.doc.regions.push_back(seal);
  }

  f.pairs.push_back({{"human", "2023年第" + quarter + "季度的营业收入是多少？"},
                     {"gpt", revenue + "亿元"},
                     {"kind", "printed_text"}});
  f.pairs.push_back({{"human", "同比增长率是多少？"},
                     {"gpt", growth + "%"},
                     {"kind", "printed_text"}});
  if (k % 2 == 0)
    f.pairs.push_back({{"human", "产品甲的销售额是多少？"},
                       {"gpt", sales_a + "万元"},
                       {"kind", "table"}});
  else
    f.pairs.push_back({{"human", "净利润率达到了多少？"},
                       {"gpt", margin + "%"},
                       {"kind", "printed_text"}});

  if (k < 6) {
    // planted ungrounded answers; the marker makes them traceable through
    // the rejects file
    f.pairs.push_back(
        {{"human", "报告的审计机构是哪一家？PLANTED_UNGROUNDED"},
         {"gpt", "未在原文出现的审计机构" + std::to_string(k) + "号"},
         {"kind", "printed_text"}});
    f.pairs.push_back({{"human", "文末署名人是谁？PLANTED_UNGROUNDED"},
                       {"gpt", "虚构署名人" + std::to_string(k)},
                       {"kind", "printed_text"}});
  } else {
    f.pairs.push_back({{"human", "研发投入金额是多少？"},
                       {"gpt", rnd + "亿元"},
                       {"kind", "printed_text"}});
    f.pairs.push_back({{"human", "这份摘要针对的是哪个季度？"},
                       {"gpt", "第" + quarter + "季度"},
                       {"kind", "printed_text"}});
  }
  return f;
}

// ------------------------------------------------------------ chart seeds

struct SeedDef {
  const char* id;
  const char* type;
  const char* csv;
};

const SeedDef kSeeds[] = {
    {"bar_sales", "bar",
     "category,Amount\nNorth,120\nSouth,86\nEast,143\nWest,97\n"},
    {"line_visits", "line",
     "category,Series A,Series B\nQ1,42,31\nQ2,55,38\nQ3,61,45\nQ4,58,52\n"},
    {"pie_share", "pie",
     "category,Share\nNorth,34\nSouth,22\nEast,28\nWest,16\n"},
    {"area_volume", "area",
     "category,Value\nQ1,18\nQ2,26\nQ3,31\nQ4,24\n"},
    {"scatter_points", "scatter",
     "x,Value\n1,4.5\n2,6.1\n3,5.2\n4,8.4\n5,7.3\n6,9.8\n"},
    {"stack_channels", "stacked_bar",
     "category,Series A,Series B,Series C\nQ1,12,9,6\nQ2,15,11,8\nQ3,13,14,9\n"},
    {"hist_bins", "histogram",
     "category,Count\n0-10,3\n10-20,8\n20-30,14\n30-40,9\n40-50,4\n"},
    {"box_groups", "box",
     "category,min,q1,median,q3,max\nGroup,2,4,6,8,11\nRegion,3,5,7,9,12\n"},
    {"heat_matrix", "heatmap",
     "category,North,South\nQ1,4,7\nQ2,6,3\nQ3,8,5\n"},
};

const char* kSeedScript =
    "import matplotlib.pyplot as plt\n"
    "fig, ax = plt.subplots(figsize=(8, 5))\n"
    "# seed plotting code kept as opaque provenance text\n"
    "plt.show()\n";

// ------------------------------------------------------------ html tables

struct TableFixture {
  const char* name;
  std::string html;
  json pairs;
};

std::vector<TableFixture> make_tables() {
  std::vector<TableFixture> tables;
  {
    TableFixture t;
    t.name = "t000_sales";
    t.html =
        "<table>\n"
        "  <tr><th>产品</th><th>销量</th><th>单价</th></tr>\n"
        "  <tr><td>甲</td><td>120</td><td>35.5</td></tr>\n"
        "  <tr><td>乙</td><td>80</td><td>42</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "甲产品的销量是多少？"}, {"gpt", "120"}, {"task_type", "Factoid"}},
        {{"human", "两种产品的销量总和是多少？"}, {"gpt", "200"}, {"task_type", "Computation"}},
        {{"human", "甲的销量是否高于乙？"}, {"gpt", "是"}, {"task_type", "Yes/No"}},
        {{"human", "销量更高的产品是哪一个？"}, {"gpt", "甲"}, {"task_type", "Comparison"}},
        {{"human", "表中列出了哪些产品？"}, {"gpt", "甲、乙"}, {"task_type", "List"}},
        {{"human", "请分析这些销量说明了什么趋势？"},
         {"gpt", "甲产品明显更受欢迎，销量领先。"},
         {"task_type", "Explanation"}},
        {{"human", "乙产品的销量是多少？"}, {"gpt", "999"}, {"task_type", "Factoid"}},
        {{"human", "你最喜欢哪种产品？"}, {"gpt", "甲"}, {"task_type", "Opinion"}},
    });
    tables.push_back(std::move(t));
  }
  {
    TableFixture t;
    t.name = "t001_rowspan";
    t.html =
        "<table>\n"
        "  <tr><th>地区</th><th>季度</th><th>收入</th></tr>\n"
        "  <tr><td rowspan=\"2\">华东</td><td>Q1</td><td>58</td></tr>\n"
        "  <tr><td>Q2</td><td>64</td></tr>\n"
        "  <tr><td rowspan=\"2\">华南</td><td>Q1</td><td>41</td></tr>\n"
        "  <tr><td>Q2</td><td>47</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "华东Q2的收入是多少？"}, {"gpt", "64"}, {"task_type", "Factoid"}},
        {{"human", "华东两个季度的收入合计是多少？"}, {"gpt", "122"}, {"task_type", "Computation"}},
        {{"human", "收入是否随季度增长？"}, {"gpt", "是"}, {"task_type", "Yes/No"}},
    });
    tables.push_back(std::move(t));
  }
  {
    TableFixture t;
    t.name = "t002_colspan";
    t.html =
        "<table>\n"
        "  <thead>\n"
        "    <tr><th colspan=\"2\">上半年</th><th colspan=\"2\">下半年</th></tr>\n"
        "    <tr><th>Q1</th><th>Q2</th><th>Q3</th><th>Q4</th></tr>\n"
        "  </thead>\n"
        "  <tr><td>12</td><td>15</td><td>18</td><td>21</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "Q4的数值是多少？"}, {"gpt", "21"}, {"task_type", "Factoid"}},
        {{"human", "全年四个季度的平均值是多少？"}, {"gpt", "16.5"}, {"task_type", "Computation"}},
        {{"human", "这一年的变化态势如何？"},
         {"gpt", "数值逐季稳定上升。"},
         {"task_type", "Time Series"}},
    });
    tables.push_back(std::move(t));
  }
  {
    TableFixture t;
    t.name = "t003_units";
    t.html =
        "<table>\n"
        "  <tr><th>指标</th><th>数值</th></tr>\n"
        "  <tr><td>增长率</td><td>12.5%</td></tr>\n"
        "  <tr><td>利润率</td><td>8.5%</td></tr>\n"
        "  <tr><td>周转天数</td><td>45</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "增长率是多少？"}, {"gpt", "12.5%"}, {"task_type", "Factoid"}},
        {{"human", "两个比率的平均值是多少？"}, {"gpt", "10.5"}, {"task_type", "Computation"}},
        {{"human", "增长率与利润率相差多少？"}, {"gpt", "4"}, {"task_type", "Computation"}},
    });
    tables.push_back(std::move(t));
  }
  {
    TableFixture t;
    t.name = "t004_mixed_span";
    t.html =
        "<table>\n"
        "  <tr><th rowspan=\"2\">部门</th><th colspan=\"2\">人数</th></tr>\n"
        "  <tr><th>在编</th><th>外聘</th></tr>\n"
        "  <tr><td>研发</td><td>36</td><td>12</td></tr>\n"
        "  <tr><td>市场</td><td>20</td><td>8</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "研发部门在编人数是多少？"}, {"gpt", "36"}, {"task_type", "Factoid"}},
        {{"human", "研发部门总人数是多少？"}, {"gpt", "48"}, {"task_type", "Computation"}},
        {{"human", "哪些部门出现在这份名单里？"}, {"gpt", "研发、市场"}, {"task_type", "List"}},
    });
    tables.push_back(std::move(t));
  }
  {
    TableFixture t;
    t.name = "t005_wide";
    t.html =
        "<table>\n"
        "  <tr><th>月份</th><th>一月</th><th>二月</th><th>三月</th><th>四月</th><th>五月</th></tr>\n"
        "  <tr><td>产量</td><td>210</td><td>198</td><td>225</td><td>240</td><td>232</td></tr>\n"
        "</table>\n";
    t.pairs = json::array({
        {{"human", "三月的产量是多少？"}, {"gpt", "225"}, {"task_type", "Factoid"}},
        {{"human", "前五个月产量的最大值是多少？"}, {"gpt", "240"}, {"task_type", "Computation"}},
        {{"human", "产量在二月是否下降了？"}, {"gpt", "是"}, {"task_type", "Yes/No"}},
    });
    tables.push_back(std::move(t));
  }
  return tables;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const fs::path out = argv[1];
  const fs::path replay = out / "replay";
  fs::create_directories(replay);

  // layouts + doc QA replay entries
  for (int k = 0; k < 10; ++k) {
    DocFixture f = make_doc(k);
    std::string layout_json = serialize_layout(f.doc);
    char name[16];
    std::snprintf(name, sizeof(name), "doc%02d.json", k);
    write_file(out / "layouts" / name, layout_json);
    std::string prompt = build_doc_prompt(layout_json, doc_qa_sample_template());
    write_replay_entry(replay, "docqa", prompt, wrap_pairs(f.pairs));
  }

  // chart seeds
  for (const auto& seed : kSeeds) {
    fs::path dir = out / "seeds" / seed.id;
    write_file(dir / "script.txt", kSeedScript);
    write_file(dir / "table.csv", seed.csv);
    write_file(dir / "meta.json",
               ordered_json{{"id", seed.id}, {"chart_type", seed.type}}.dump(2) + "\n");
  }

  // llm-mutation replay entry for the area seed
  {
    ChartSeed area;
    area.id = "area_volume";
    area.script_text = kSeedScript;
    area.data_table = kSeeds[3].csv;
    area.chart_type = ChartType::area;
    const std::vector<std::string> topics = {"Art & Design", "Science & Nature"};
    std::string prompt = build_chart_image_prompt(area, topics);
    ordered_json spec{
        {"chart_type", "area"},
        {"title", "艺术与设计 展览观众量"},
        {"topic", "艺术与设计"},
        {"width_px", 1040},
        {"height_px", 640},
        {"categories", {"一月", "二月", "三月", "四月", "五月"}},
        {"series", json::array({json{{"label", "观众量"},
                                     {"values", {120.5, 98.2, 143.8, 131.4, 156.9}}}})},
        {"colors", {"#4C72B0"}},
        {"x_label", "月份"},
        {"y_label", "人数"},
        {"locale", "zh"},
        {"legend_position", "top_right"}};
    std::string response =
        "表格数据如下：\n```\ncategory,观众量\n一月,120.5\n二月,98.2\n三月,143.8\n"
        "四月,131.4\n五月,156.9\n```\n对应的图表描述：\n```json\n" +
        spec.dump(2) + "\n```\n";
    write_replay_entry(replay, "chartmut", prompt, response);
  }

  // llm chart-QA replay entry over a deterministic rule mutation
  {
    ChartSeed bar;
    bar.id = "bar_sales";
    bar.script_text = kSeedScript;
    bar.data_table = kSeeds[0].csv;
    bar.chart_type = ChartType::bar;
    const std::vector<std::string> topics = {"Art & Design", "Science & Nature"};
    MutationResult mut = mutate_spec(bar, topics, 7, MutateVia::rule_based);
    CsvTable table = parse_csv(mut.table_csv);
    std::string prompt =
        build_chart_qa_prompt(mut.spec, table, TaskMatrix::defaults());

    double maxv = table.rows[0].size() > 1
                      ? *text::parse_number(table.rows[0][1])
                      : 0;
    double first = maxv;
    for (const auto& row : table.rows)
      maxv = std::max(maxv, *text::parse_number(row[1]));
    json pairs = json::array({
        {{"human", "图中数值最大是多少？"}, {"gpt", fmt(maxv)}, {"task_type", "extremum_max"}},
        {{"human", "第一个类别的数值是多少？"}, {"gpt", fmt(first)}, {"task_type", "value_lookup"}},
        {{"human", "所有类别的总和是多少？"}, {"gpt", "123456"}, {"task_type", "sum"}},
        {{"human", "数据整体走势如何？"}, {"gpt", "整体平稳。"}, {"task_type", "trend"}},
    });
    write_replay_entry(replay, "chartqa", prompt, wrap_pairs(pairs));
  }

  // html tables + table QA replay entries
  for (const auto& t : make_tables()) {
    write_file(out / "tables" / (std::string(t.name) + ".html"), t.html);
    std::string prompt = build_table_prompt(t.html, table_qa_sample_template());
    write_replay_entry(replay, "tableqa", prompt, wrap_pairs(t.pairs));
  }

  // mix plan
  write_file(out / "plan.json",
             ordered_json{
                 {"sources",
                  json::array({ordered_json{{"name", "public-mix"},
                                            {"size", 33000},
                                            {"is_synthetic", false}},
                               ordered_json{{"name", "synthetic-docs"},
                                            {"size", 4770},
                                            {"is_synthetic", true}}})},
                 {"target_synthetic_fraction", 0.20}}
                     .dump(2) +
                 "\n");

  // replay-mode config pointing at this corpus
  write_file(out / "config.ini",
             "[gateway]\n"
             "endpoint = http://127.0.0.1:9/unused\n"
             "model = fixture-model\n"
             "max_retries = 2\n"
             "max_inflight = 4\n"
             "mode = replay\n"
             "replay_store = " + fs::absolute(replay).string() + "\n"
             "\n"
             "[docqa]\n"
             "min_pairs = 5\n"
             "\n"
             "[chart]\n"
             "topic_pool = Art & Design, Science & Nature\n"
             "count = 3\n"
             "\n"
             "[run]\n"
             "workers = 2\n");

  std::cout << "fixtures written to " << out.string() << "\n";
  return 0;
}
