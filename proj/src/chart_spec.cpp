#include <algorithm>

#include <nlohmann/json.hpp>

#include "docsynth/chart.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ChartType t) {
  switch (t) {
    case ChartType::bar: return "bar";
    case ChartType::line: return "line";
    case ChartType::pie: return "pie";
    case ChartType::area: return "area";
    case ChartType::scatter: return "scatter";
    case ChartType::stacked_bar: return "stacked_bar";
    case ChartType::histogram: return "histogram";
    case ChartType::box: return "box";
    case ChartType::heatmap: return "heatmap";
  }
  return "bar";
}

std::optional<ChartType> chart_type_from_string(const std::string& s) {
  for (ChartType t : all_chart_types())
    if (s == to_string(t)) return t;
  return std::nullopt;
}

const std::vector<ChartType>& all_chart_types() {
  static const std::vector<ChartType> types = {
      ChartType::bar,       ChartType::line,      ChartType::pie,
      ChartType::area,      ChartType::scatter,   ChartType::stacked_bar,
      ChartType::histogram, ChartType::box,       ChartType::heatmap};
  return types;
}

const char* to_string(LegendPosition p) {
  switch (p) {
    case LegendPosition::top_left: return "top_left";
    case LegendPosition::top_center: return "top_center";
    case LegendPosition::top_right: return "top_right";
    case LegendPosition::right: return "right";
    case LegendPosition::bottom: return "bottom";
    case LegendPosition::none: return "none";
  }
  return "top_right";
}

std::optional<LegendPosition> legend_position_from_string(const std::string& s) {
  for (LegendPosition p :
       {LegendPosition::top_left, LegendPosition::top_center, LegendPosition::top_right,
        LegendPosition::right, LegendPosition::bottom, LegendPosition::none})
    if (s == to_string(p)) return p;
  return std::nullopt;
}

static bool is_hex_color(const std::string& c) {
  if (c.size() != 7 || c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(), [](unsigned char ch) {
    return std::isxdigit(ch);
  });
}

void validate_spec(const ChartSpec& spec) {
  if (spec.width_px <= 0 || spec.height_px <= 0)
    throw Error("chart dimensions must be positive");
  if (spec.series.empty()) throw Error("chart needs at least one series");
  for (const auto& c : spec.colors)
    if (!is_hex_color(c)) throw Error("bad color \"" + c + "\", want #RRGGBB");
  if (spec.colors.size() < spec.series.size())
    throw Error("need one color per series");

  const size_t n = spec.chart_type == ChartType::scatter ? spec.xs.size()
                                                         : spec.categories.size();
  if (n == 0) throw Error("chart has no data points");
  for (const auto& s : spec.series)
    if (s.values.size() != n)
      throw Error("series \"" + s.label + "\" length " +
                  std::to_string(s.values.size()) + " != " + std::to_string(n));

  switch (spec.chart_type) {
    case ChartType::pie:
    case ChartType::area:
    case ChartType::histogram:
      if (spec.series.size() != 1)
        throw Error(std::string(to_string(spec.chart_type)) +
                    " chart requires exactly one series");
      break;
    case ChartType::box: {
      if (spec.series.size() != 5)
        throw Error("box chart requires the five summary series");
      static const char* kStats[5] = {"min", "q1", "median", "q3", "max"};
      for (size_t i = 0; i < 5; ++i)
        if (spec.series[i].label != kStats[i])
          throw Error("box series must be labeled min/q1/median/q3/max in order");
      for (size_t c = 0; c < n; ++c)
        for (size_t i = 1; i < 5; ++i)
          if (spec.series[i].values[c] < spec.series[i - 1].values[c])
            throw Error("box summary out of order for group \"" +
                        spec.categories[c] + "\"");
      break;
    }
    case ChartType::stacked_bar:
      if (spec.series.size() < 2)
        throw Error("stacked_bar requires at least two series");
      break;
    default:
      break;
  }
  if (spec.chart_type == ChartType::pie)
    for (double v : spec.series[0].values)
      if (v < 0) throw Error("pie slices must be non-negative");
}

ordered_json spec_to_json(const ChartSpec& spec) {
  ordered_json series = ordered_json::array();
  for (const auto& s : spec.series)
    series.push_back(ordered_json{{"label", s.label}, {"values", s.values}});
  ordered_json annotations = ordered_json::array();
  for (const auto& a : spec.annotations)
    annotations.push_back(
        ordered_json{{"text", a.text}, {"anchor", {a.ax, a.ay}}});
  return ordered_json{{"chart_type", to_string(spec.chart_type)},
                      {"title", spec.title},
                      {"topic", spec.topic},
                      {"width_px", spec.width_px},
                      {"height_px", spec.height_px},
                      {"categories", spec.categories},
                      {"xs", spec.xs},
                      {"series", series},
                      {"colors", spec.colors},
                      {"x_label", spec.x_label},
                      {"y_label", spec.y_label},
                      {"annotations", annotations},
                      {"locale", to_string(spec.locale)},
                      {"legend_position", to_string(spec.legend_position)}};
}

ChartSpec spec_from_json(const json& j) {
  ChartSpec spec;
  auto type = chart_type_from_string(j.at("chart_type").get<std::string>());
  if (!type) throw Error("unknown chart_type: " + j["chart_type"].dump());
  spec.chart_type = *type;
  spec.title = j.value("title", "");
  spec.topic = j.value("topic", "");
  spec.width_px = j.value("width_px", 960);
  spec.height_px = j.value("height_px", 600);
  if (j.contains("categories"))
    spec.categories = j["categories"].get<std::vector<std::string>>();
  if (j.contains("xs")) spec.xs = j["xs"].get<std::vector<double>>();
  if (j.contains("series"))
    for (const auto& s : j["series"])
      spec.series.push_back(
          {s.at("label").get<std::string>(),
           s.contains("values") ? s["values"].get<std::vector<double>>()
                                : std::vector<double>{}});
  if (j.contains("colors")) spec.colors = j["colors"].get<std::vector<std::string>>();
  spec.x_label = j.value("x_label", "");
  spec.y_label = j.value("y_label", "");
  if (j.contains("annotations"))
    for (const auto& a : j["annotations"]) {
      Annotation ann;
      ann.text = a.at("text").get<std::string>();
      if (a.contains("anchor") && a["anchor"].is_array() && a["anchor"].size() == 2) {
        ann.ax = a["anchor"][0].get<double>();
        ann.ay = a["anchor"][1].get<double>();
      }
      spec.annotations.push_back(ann);
    }
  if (j.contains("locale"))
    spec.locale = language_from_string(j["locale"].get<std::string>());
  if (j.contains("legend_position")) {
    auto p = legend_position_from_string(j["legend_position"].get<std::string>());
    if (!p) throw Error("unknown legend_position: " + j["legend_position"].dump());
    spec.legend_position = *p;
  }
  return spec;
}

CsvTable spec_to_table(const ChartSpec& spec) {
  CsvTable t;
  const bool scatter = spec.chart_type == ChartType::scatter;
  t.header.push_back(scatter ? "x" : "category");
  for (const auto& s : spec.series) t.header.push_back(s.label);
  const size_t n = scatter ? spec.xs.size() : spec.categories.size();
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> row;
    row.push_back(scatter ? text::format_double(spec.xs[i]) : spec.categories[i]);
    for (const auto& s : spec.series) row.push_back(text::format_double(s.values[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void series_from_table(ChartSpec& spec, const CsvTable& table) {
  if (table.header.empty() || table.rows.empty())
    throw Error("data table needs a header and at least one row");
  const bool scatter = spec.chart_type == ChartType::scatter;
  spec.categories.clear();
  spec.xs.clear();
  spec.series.clear();
  for (size_t c = 1; c < table.header.size(); ++c)
    spec.series.push_back({table.header[c], {}});
  if (spec.series.empty()) throw Error("data table has no value columns");
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (scatter) {
      auto x = text::parse_number(row[0]);
      if (!x) throw Error("row " + std::to_string(r) + ": x value \"" + row[0] +
                          "\" is not numeric");
      spec.xs.push_back(*x);
    } else {
      spec.categories.push_back(row[0]);
    }
    for (size_t c = 1; c < row.size(); ++c) {
      auto v = text::parse_number(row[c]);
      if (!v) throw Error("row " + std::to_string(r) + ", column \"" +
                          table.header[c] + "\": value \"" + row[c] +
                          "\" is not numeric");
      spec.series[c - 1].values.push_back(*v);
    }
  }
}

TaskMatrix TaskMatrix::defaults() {
  TaskMatrix m;
  m.allowed[ChartType::bar] = {"value_lookup", "extremum_max", "extremum_min",
                               "sum", "average", "count", "comparison"};
  m.allowed[ChartType::line] = {"value_lookup", "extremum_max", "extremum_min",
                                "average", "comparison", "trend"};
  m.allowed[ChartType::pie] = {"value_lookup", "extremum_max", "extremum_min",
                               "sum", "comparison"};
  m.allowed[ChartType::area] = {"value_lookup", "extremum_max", "sum", "trend"};
  m.allowed[ChartType::scatter] = {"extremum_max", "extremum_min", "count",
                                   "comparison", "description"};
  m.allowed[ChartType::stacked_bar] = {"value_lookup", "sum", "extremum_max",
                                       "comparison"};
  m.allowed[ChartType::histogram] = {"extremum_max", "count", "sum", "comparison"};
  m.allowed[ChartType::box] = {"value_lookup", "extremum_max", "extremum_min",
                               "comparison"};
  m.allowed[ChartType::heatmap] = {"value_lookup", "extremum_max", "average",
                                   "comparison"};
  return m;
}

const std::vector<std::string>& TaskMatrix::tasks_for(ChartType t) const {
  auto it = allowed.find(t);
  if (it == allowed.end() || it->second.empty())
    throw Error(std::string("task matrix has no tasks for chart type ") +
                to_string(t));
  return it->second;
}

void validate_matrix(const TaskMatrix& matrix) {
  for (ChartType t : all_chart_types()) matrix.tasks_for(t);
  for (const auto& [type, tasks] : matrix.allowed)
    for (const auto& task : tasks)
      if (std::find(kChartTaskTags.begin(), kChartTaskTags.end(), task) ==
          kChartTaskTags.end())
        throw Error("unknown chart task tag: " + task);
}

}  // namespace docsynth
