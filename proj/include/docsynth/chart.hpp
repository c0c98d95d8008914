#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "docsynth/corpus.hpp"
#include "docsynth/csv.hpp"

namespace docsynth {

class LlmGateway;

enum class ChartType {
  bar,
  line,
  pie,
  area,
  scatter,
  stacked_bar,
  histogram,
  box,
  heatmap
};

const char* to_string(ChartType t);
std::optional<ChartType> chart_type_from_string(const std::string& s);
const std::vector<ChartType>& all_chart_types();

// Seed corpus entry: an opaque plot script kept as provenance, plus the
// data table the chart was drawn from.
struct ChartSeed {
  std::string id;
  std::string script_text;
  std::string data_table;  // CSV with header row
  ChartType chart_type = ChartType::bar;
};

struct Series {
  std::string label;
  std::vector<double> values;
  bool operator==(const Series&) const = default;
};

struct Annotation {
  std::string text;
  double ax = 0.5;  // anchor, canvas-width fraction
  double ay = 0.5;  // anchor, canvas-height fraction
  bool operator==(const Annotation&) const = default;
};

enum class LegendPosition { top_left, top_center, top_right, right, bottom, none };
const char* to_string(LegendPosition p);
std::optional<LegendPosition> legend_position_from_string(const std::string& s);

// Structured chart description; the renderer and the emitted data table
// are both pure functions of this value.
//
// Data layout per type:
//   bar/line/stacked_bar/heatmap - categories x series grid
//   pie/area/histogram           - categories x exactly 1 series
//   scatter                      - shared xs, series give y values
//   box                          - categories are groups; exactly five
//                                  series labeled min/q1/median/q3/max
struct ChartSpec {
  ChartType chart_type = ChartType::bar;
  std::string title;
  std::string topic;
  int width_px = 960;
  int height_px = 600;
  std::vector<std::string> categories;
  std::vector<double> xs;  // scatter only
  std::vector<Series> series;
  std::vector<std::string> colors;  // #RRGGBB, one per series
  std::string x_label;
  std::string y_label;
  std::vector<Annotation> annotations;
  Language locale = Language::en;
  LegendPosition legend_position = LegendPosition::top_right;
  bool operator==(const ChartSpec&) const = default;
};

void validate_spec(const ChartSpec& spec);

nlohmann::ordered_json spec_to_json(const ChartSpec& spec);
ChartSpec spec_from_json(const nlohmann::json& j);

// Canonical data table for the spec; values round-trip exactly.
CsvTable spec_to_table(const ChartSpec& spec);

// Replaces categories/xs/series from a parsed table (header layout as
// produced by spec_to_table).
void series_from_table(ChartSpec& spec, const CsvTable& table);

// chart type -> allowed task type tags
struct TaskMatrix {
  std::map<ChartType, std::vector<std::string>> allowed;
  static TaskMatrix defaults();
  const std::vector<std::string>& tasks_for(ChartType t) const;
};

void validate_matrix(const TaskMatrix& matrix);

// Chart task tags. The first seven are machine-verifiable against the
// data table; trend and description are free-form.
inline const std::vector<std::string> kChartTaskTags = {
    "value_lookup", "extremum_max", "extremum_min", "sum",     "average",
    "count",        "comparison",   "trend",        "description"};

enum class MutateVia { rule_based, llm };

using Translator = std::function<std::string(const std::string&)>;
Translator builtin_zh_translator();

struct MutationResult {
  ChartSpec spec;
  std::string table_csv;
};

// Seeded diversification of a seed chart: new values, topic, colors,
// dimensions and locale. The emitted table always matches the spec's
// series exactly. The llm path sends the diversification prompt and
// rebuilds the series from the fenced table in the response.
MutationResult mutate_spec(const ChartSeed& seed,
                           const std::vector<std::string>& topics_pool,
                           uint64_t rng_seed, MutateVia via,
                           LlmGateway* gateway = nullptr,
                           const Translator& translate = {});

// First triple-backtick block that parses as CSV; a stray format label on
// the fence line is tolerated and stripped.
CsvTable extract_fenced_table(const std::string& llm_text);

// Prompt construction, shared by the pipelines and the fixture tooling so
// replay keys stay in lockstep with the generators.
std::string build_chart_image_prompt(const ChartSeed& seed,
                                     const std::vector<std::string>& topics_pool);
std::string build_chart_qa_prompt(const ChartSpec& spec, const CsvTable& table,
                                  const TaskMatrix& matrix);
nlohmann::json chart_qa_sample_template(const std::string& first_task);

// Deterministic SVG bytes for identical (spec, rng_seed).
std::string render(const ChartSpec& spec, uint64_t rng_seed);

// Layout diagnostics computed from the rendered SVG: text outside the
// canvas, clipped legend, legend/title overlap. Empty means pass.
std::vector<std::string> lint_layout(const ChartSpec& spec,
                                     const std::string& rendered_svg);

// Preset-template QA (no model involved); every answer is derived from
// the table, one record per allowed task type.
std::vector<QaRecord> template_chart_qa(const ChartSpec& spec,
                                        const CsvTable& table,
                                        const TaskMatrix& matrix,
                                        uint64_t rng_seed,
                                        const std::string& image_ref);

// Model-backed QA over the diversified chart; records are verified
// against the table before they are emitted.
std::vector<QaRecord> gen_chart_qa(const ChartSpec& spec, const CsvTable& table,
                                   const TaskMatrix& matrix, LlmGateway& gateway,
                                   const std::string& image_ref);

enum class Verdict { verified, unverifiable, wrong };

struct VerifyResult {
  Verdict verdict = Verdict::unverifiable;
  std::string expected;  // representative ground truth when wrong
};

// Brute-force check of a chart answer against the data table (relative
// tolerance 1e-6 after percent/unit normalization).
VerifyResult verify_chart_answer(const QaRecord& record, const CsvTable& table);

}  // namespace docsynth
