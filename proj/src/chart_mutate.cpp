#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "docsynth/chart.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/prompts.hpp"
#include "docsynth/rng.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string hsv_hex(double h, double s, double v) {
  double c = v * s;
  double hp = h / 60.0;
  double x = c * (1 - std::fabs(std::fmod(hp, 2.0) - 1));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  double m = v - c;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X",
                static_cast<int>(std::lround((r + m) * 255)),
                static_cast<int>(std::lround((g + m) * 255)),
                static_cast<int>(std::lround((b + m) * 255)));
  return buf;
}

// Perturb every value, keep data points pairwise distinct within a series.
void perturb_series(Series& series, Rng& rng) {
  for (double& v : series.values) {
    double factor = rng.uniform(0.7, 1.3);
    v = round2(v * factor);
  }
  for (size_t i = 0; i < series.values.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (series.values[i] == series.values[j])
        series.values[i] = round2(series.values[i] + 0.01 * (i + 1));
}

void sort_box_stats(ChartSpec& spec) {
  for (size_t c = 0; c < spec.categories.size(); ++c) {
    std::array<double, 5> stats;
    for (size_t s = 0; s < 5; ++s) stats[s] = spec.series[s].values[c];
    std::sort(stats.begin(), stats.end());
    for (size_t s = 0; s < 5; ++s) spec.series[s].values[c] = stats[s];
  }
}

}  // namespace

Translator builtin_zh_translator() {
  // Visible-string dictionary for test and rule-based runs; unknown input
  // passes through so already-Chinese strings stay put.
  static const std::map<std::string, std::string> dict = {
      {"Art & Design", "艺术与设计"},
      {"Science & Nature", "科学与自然"},
      {"Economy & Finance", "经济与金融"},
      {"Health & Sports", "健康与运动"},
      {"Education & Culture", "教育与文化"},
      {"Travel & Transport", "旅行与交通"},
      {"Overview", "概览"},
      {"Value", "数值"},
      {"Count", "数量"},
      {"Amount", "金额"},
      {"Share", "占比"},
      {"Category", "类别"},
      {"Month", "月份"},
      {"Quarter", "季度"},
      {"Year", "年份"},
      {"Region", "地区"},
      {"Group", "组别"},
      {"Series A", "系列一"},
      {"Series B", "系列二"},
      {"Series C", "系列三"},
      {"North", "北部"},
      {"South", "南部"},
      {"East", "东部"},
      {"West", "西部"},
  };
  return [](const std::string& s) -> std::string {
    auto it = dict.find(s);
    if (it != dict.end()) return it->second;
    auto sp = s.find(' ');  // "Art & Design Overview" -> parts
    if (sp != std::string::npos) {
      auto head = dict.find(s.substr(0, s.rfind(' ')));
      auto tail = dict.find(s.substr(s.rfind(' ') + 1));
      if (head != dict.end() && tail != dict.end())
        return head->second + tail->second;
    }
    return s;
  };
}

static MutationResult mutate_rule_based(const ChartSeed& seed,
                                        const std::vector<std::string>& topics_pool,
                                        uint64_t rng_seed,
                                        const Translator& translate) {
  if (topics_pool.empty()) throw Error("topics pool is empty");
  CsvTable base = parse_csv(seed.data_table);

  ChartSpec spec;
  spec.chart_type = seed.chart_type;
  series_from_table(spec, base);

  Rng rng(rng_seed);
  const std::string topic = topics_pool[rng.below(topics_pool.size())];

  for (auto& s : spec.series) perturb_series(s, rng);
  if (spec.chart_type == ChartType::box) sort_box_stats(spec);
  if (spec.chart_type == ChartType::pie)
    for (auto& s : spec.series)
      for (double& v : s.values) v = std::fabs(v);

  spec.colors.clear();
  double hue0 = rng.uniform(0.0, 360.0);
  for (size_t i = 0; i < spec.series.size(); ++i)
    spec.colors.push_back(hsv_hex(
        std::fmod(hue0 + 360.0 * static_cast<double>(i) / spec.series.size(), 360.0),
        0.65, 0.80));

  spec.width_px = static_cast<int>(rng.uniform_int(420, 640)) * 2;  // 840..1280
  spec.height_px = static_cast<int>(rng.uniform_int(280, 420)) * 2;

  Translator tr = translate ? translate : builtin_zh_translator();
  spec.locale = Language::zh;
  spec.topic = tr(topic);
  spec.title = tr(topic + " Overview");
  spec.x_label = tr("Category");
  spec.y_label = tr("Value");
  for (auto& c : spec.categories) c = tr(c);
  for (auto& s : spec.series) s.label = tr(s.label);

  spec.legend_position = rng.bernoulli(0.5) ? LegendPosition::top_right
                                            : LegendPosition::right;

  // call out the series maximum; anchored inside the safe central band
  const auto& first = spec.series[0];
  size_t argmax = 0;
  for (size_t i = 1; i < first.values.size(); ++i)
    if (first.values[i] > first.values[argmax]) argmax = i;
  Annotation note;
  note.text = (spec.locale == Language::zh ? "峰值 " : "peak ") +
              text::format_double(first.values[argmax]);
  note.ax = rng.uniform(0.25, 0.75);
  note.ay = rng.uniform(0.14, 0.22);
  spec.annotations.push_back(note);

  validate_spec(spec);
  MutationResult result;
  result.table_csv = to_csv(spec_to_table(spec));
  result.spec = std::move(spec);
  return result;
}

std::string build_chart_image_prompt(const ChartSeed& seed,
                                     const std::vector<std::string>& topics_pool) {
  return prompts::substitute(prompts::kChartImage,
                             {{"code", seed.script_text},
                              {"topics_pool", text::join(topics_pool, ", ")}});
}

static MutationResult mutate_llm(const ChartSeed& seed,
                                 const std::vector<std::string>& topics_pool,
                                 uint64_t rng_seed, LlmGateway& gateway) {
  ChatRequest req;
  req.user_text = build_chart_image_prompt(seed, topics_pool);
  req.tag = "chartmut";
  req.temperature = gateway.config().temperature;
  req.max_output_tokens = gateway.config().max_output_tokens;
  ChatResult res = gateway.complete(req);

  CsvTable table = extract_fenced_table(res.text);
  ChartSpec spec = spec_from_json(extract_json_fence(res.text));
  if (spec.colors.empty())
    throw Error("llm chart spec carries no colors");
  // the fenced table is the ground truth for the data
  series_from_table(spec, table);
  while (spec.colors.size() < spec.series.size())
    spec.colors.push_back(spec.colors.back());
  validate_spec(spec);

  MutationResult result;
  result.table_csv = to_csv(spec_to_table(spec));
  result.spec = std::move(spec);
  (void)rng_seed;
  return result;
}

MutationResult mutate_spec(const ChartSeed& seed,
                           const std::vector<std::string>& topics_pool,
                           uint64_t rng_seed, MutateVia via, LlmGateway* gateway,
                           const Translator& translate) {
  parse_csv(seed.data_table);  // seed invariant: table parses with a header
  if (via == MutateVia::rule_based)
    return mutate_rule_based(seed, topics_pool, rng_seed, translate);
  if (!gateway) throw Error("llm mutation requires a gateway");
  return mutate_llm(seed, topics_pool, rng_seed, *gateway);
}

CsvTable extract_fenced_table(const std::string& llm_text) {
  auto fences = scan_fenced_blocks(llm_text);
  if (fences.empty()) throw Error("no fenced table found");
  std::string last_error = "no fenced block parses as CSV";
  for (const auto& f : fences) {
    // labels like "csv"/"plaintext" are stripped by the fence scanner
    try {
      CsvTable t = parse_csv(f.body);
      if (t.rows.empty()) continue;
      // require at least one numeric value column to weed out code blocks
      bool numeric = false;
      for (size_t c = 1; c < t.header.size() && !numeric; ++c)
        numeric = text::parse_number(t.rows[0][c]).has_value();
      if (!numeric && t.header.size() > 1) continue;
      return t;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error("no fenced table found: " + last_error);
}

}  // namespace docsynth
