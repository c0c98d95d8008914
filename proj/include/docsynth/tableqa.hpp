#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "docsynth/chart.hpp"  // Verdict / VerifyResult
#include "docsynth/corpus.hpp"

namespace docsynth {

class LlmGateway;

struct GridCell {
  std::string text;
  int origin_r = 0;  // top-left cell this position was expanded from
  int origin_c = 0;
  bool is_header = false;
  bool span_member = false;  // true for positions covered by a span
  bool operator==(const GridCell&) const = default;
};

// Dense rowspan/colspan-expanded cell matrix.
struct TableGrid {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<GridCell> cells;  // row-major

  const GridCell& at(int r, int c) const { return cells[r * n_cols + c]; }
  GridCell& at(int r, int c) { return cells[r * n_cols + c]; }
};

// Parses the single <table> element in `html`. Spans are expanded by
// copying the origin text into every covered position. Errors: no table,
// more than one table, nested tables, overlapping spans, rows that cannot
// be rectangularized.
TableGrid parse_html_table(const std::string& html);

struct ColumnStats {
  int col = 0;
  double min = 0, max = 0, sum = 0, mean = 0;
};

struct GridFeatures {
  std::vector<std::string> themes;  // distinct header texts
  std::vector<ColumnStats> numeric_columns;
  int n_rows = 0;
  int n_cols = 0;
};

// A column counts as numeric when at least 80% of its non-header cells
// parse as numbers after unit normalization; stats cover the parsed ones.
GridFeatures grid_features(const TableGrid& grid);

enum class TableTaskType {
  Factoid,
  FreeForm,
  MultipleChoice,
  List,
  YesNo,
  Explanation,
  Comparison,
  Causal,
  Computation,
  Classification,
  TimeSeries
};

inline constexpr int kTableTaskTypeCount = 11;
const char* to_string(TableTaskType t);
// Accepts both the canonical enum spelling and the display form used in
// the prompt ("Free Form", "Yes/No", "Time Series").
std::optional<TableTaskType> table_task_from_string(const std::string& s);

std::string build_table_prompt(const std::string& html,
                               const nlohmann::json& template_example);

// Output-format sample substituted for {template} by gen_table_qa.
nlohmann::json table_qa_sample_template();

struct TableBatch {
  std::vector<QaRecord> records;
  bool under_filled = false;
  std::string prompt;
};

TableBatch gen_table_qa(const std::string& html, LlmGateway& gateway,
                        const std::string& image_ref);

// Factoid -> cell-text match; Computation -> sum/mean/min/max/pairwise
// difference over any numeric row or column (relative tolerance 1e-6);
// YesNo -> yes/no forms; Comparison/List/MultipleChoice -> answer tokens
// drawn from cell texts; the remaining five types are unverifiable.
VerifyResult verify_table_answer(const QaRecord& record, const TableGrid& grid);

}  // namespace docsynth
