#include "docsynth/tableqa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/prompts.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;

namespace {

std::string decode_entities(const std::string& s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string::npos || semi - i > 8) {
      out += s[i++];
      continue;
    }
    std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos" || ent == "#39") out += '\'';
    else if (ent == "nbsp") out += ' ';
    else if (!ent.empty() && ent[0] == '#') {
      char32_t cp = static_cast<char32_t>(std::strtoul(ent.c_str() + 1, nullptr, 10));
      out += text::encode_utf8({cp});
    } else {
      out += s.substr(i, semi - i + 1);
      i = semi + 1;
      continue;
    }
    i = semi + 1;
  }
  return out;
}

std::string collapse_ws(const std::string& s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

struct Tag {
  std::string name;   // lowercase
  bool closing = false;
  std::string attrs;  // raw attribute text
  size_t end = 0;     // index just past '>'
};

std::optional<Tag> read_tag(const std::string& s, size_t pos) {
  if (pos >= s.size() || s[pos] != '<') return std::nullopt;
  auto close = s.find('>', pos);
  if (close == std::string::npos) return std::nullopt;
  Tag t;
  size_t i = pos + 1;
  if (i < s.size() && s[i] == '/') {
    t.closing = true;
    ++i;
  }
  size_t name_start = i;
  while (i < close && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-'))
    ++i;
  t.name = text::to_lower_ascii(s.substr(name_start, i - name_start));
  t.attrs = s.substr(i, close - i);
  t.end = close + 1;
  return t;
}

int span_attr(const std::string& attrs, const std::string& name) {
  std::string lower = text::to_lower_ascii(attrs);
  auto pos = lower.find(name);
  while (pos != std::string::npos) {
    size_t i = pos + name.size();
    while (i < lower.size() && std::isspace(static_cast<unsigned char>(lower[i]))) ++i;
    if (i < lower.size() && lower[i] == '=') {
      ++i;
      while (i < lower.size() && std::isspace(static_cast<unsigned char>(lower[i]))) ++i;
      char quote = 0;
      if (i < lower.size() && (lower[i] == '"' || lower[i] == '\'')) quote = lower[i++];
      std::string num;
      while (i < lower.size() && std::isdigit(static_cast<unsigned char>(lower[i])))
        num += lower[i++];
      if (quote && (i >= lower.size() || lower[i] != quote)) return 1;
      if (!num.empty()) {
        int v = std::atoi(num.c_str());
        return v >= 1 ? v : 1;
      }
    }
    pos = lower.find(name, pos + 1);
  }
  return 1;
}

std::string strip_comments(const std::string& html) {
  std::string out;
  size_t i = 0;
  while (i < html.size()) {
    if (html.compare(i, 4, "<!--") == 0) {
      auto end = html.find("-->", i);
      if (end == std::string::npos) break;
      i = end + 3;
      continue;
    }
    out += html[i++];
  }
  return out;
}

struct RawCell {
  std::string txt;
  int rowspan = 1;
  int colspan = 1;
  bool header = false;
};

}  // namespace

TableGrid parse_html_table(const std::string& html_in) {
  const std::string html = strip_comments(html_in);

  // locate the single table element
  std::string lower = text::to_lower_ascii(html);
  auto topen = lower.find("<table");
  if (topen == std::string::npos) throw Error("no <table> element found");
  auto tclose = lower.find("</table>", topen);
  if (tclose == std::string::npos) throw Error("unterminated <table> element");
  if (lower.find("<table", topen + 6) != std::string::npos) {
    auto second = lower.find("<table", topen + 6);
    if (second < tclose) throw Error("nested tables are not supported");
    throw Error("more than one <table> element");
  }
  const std::string body = html.substr(topen, tclose - topen);

  // collect rows of raw cells; thead rows and <th> cells mark headers
  std::vector<std::vector<RawCell>> raw_rows;
  bool in_thead = false;
  bool in_row = false;
  bool row_from_thead = false;
  std::vector<RawCell> row;
  size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '<') {
      ++i;
      continue;
    }
    auto tag = read_tag(body, i);
    if (!tag) {
      ++i;
      continue;
    }
    if (tag->name == "thead") {
      in_thead = !tag->closing;
    } else if (tag->name == "tr") {
      if (!tag->closing) {
        if (in_row) {
          raw_rows.push_back(row);
          row.clear();
        }
        in_row = true;
        row_from_thead = in_thead;
      } else if (in_row) {
        raw_rows.push_back(row);
        row.clear();
        in_row = false;
      }
    } else if ((tag->name == "td" || tag->name == "th") && !tag->closing) {
      if (!in_row) throw Error("cell outside of a table row");
      RawCell cell;
      cell.header = tag->name == "th" || row_from_thead;
      cell.rowspan = span_attr(tag->attrs, "rowspan");
      cell.colspan = span_attr(tag->attrs, "colspan");
      // inner text: strip nested inline tags up to the matching close
      size_t inner = tag->end;
      std::string content;
      while (inner < body.size()) {
        if (body[inner] == '<') {
          auto t2 = read_tag(body, inner);
          if (!t2) { ++inner; continue; }
          if ((t2->name == "td" || t2->name == "th") && t2->closing) {
            inner = t2->end;
            break;
          }
          if ((t2->name == "td" || t2->name == "th" || t2->name == "tr") &&
              !t2->closing)
            break;  // unterminated cell, next cell starts
          inner = t2->end;
          continue;
        }
        content += body[inner++];
      }
      cell.txt = collapse_ws(text::trim(decode_entities(content)));
      row.push_back(std::move(cell));
      i = inner;
      continue;
    }
    i = tag->end;
  }
  if (in_row) raw_rows.push_back(row);
  if (raw_rows.empty()) throw Error("table has no rows");

  // span expansion with an occupancy sheet
  struct Slot {
    bool used = false;
    GridCell cell;
  };
  std::vector<std::vector<Slot>> sheet(raw_rows.size());
  size_t width = 0;

  auto ensure = [&](size_t r, size_t c) -> Slot& {
    if (r >= sheet.size()) throw Error("rowspan extends past the last table row");
    if (sheet[r].size() <= c) sheet[r].resize(c + 1);
    width = std::max(width, c + 1);
    return sheet[r][c];
  };

  for (size_t r = 0; r < raw_rows.size(); ++r) {
    size_t c = 0;
    for (const auto& cell : raw_rows[r]) {
      while (c < sheet[r].size() && sheet[r][c].used) ++c;
      for (int dr = 0; dr < cell.rowspan; ++dr)
        for (int dc = 0; dc < cell.colspan; ++dc) {
          Slot& slot = ensure(r + dr, c + dc);
          if (slot.used)
            throw Error("overlapping spans at row " + std::to_string(r + dr) +
                        ", column " + std::to_string(c + dc));
          slot.used = true;
          slot.cell.text = cell.txt;
          slot.cell.origin_r = static_cast<int>(r);
          slot.cell.origin_c = static_cast<int>(c);
          slot.cell.is_header = cell.header;
          slot.cell.span_member = dr != 0 || dc != 0;
        }
      c += cell.colspan;
    }
  }

  TableGrid grid;
  grid.n_rows = static_cast<int>(sheet.size());
  grid.n_cols = static_cast<int>(width);
  if (grid.n_rows < 1 || grid.n_cols < 1) throw Error("empty table");
  grid.cells.resize(static_cast<size_t>(grid.n_rows) * grid.n_cols);
  for (int r = 0; r < grid.n_rows; ++r)
    for (int c = 0; c < grid.n_cols; ++c) {
      if (static_cast<size_t>(c) >= sheet[r].size() || !sheet[r][c].used)
        throw Error("ragged table: row " + std::to_string(r) +
                    " leaves column " + std::to_string(c) + " unfilled");
      grid.at(r, c) = sheet[r][c].cell;
    }
  return grid;
}

GridFeatures grid_features(const TableGrid& grid) {
  GridFeatures f;
  f.n_rows = grid.n_rows;
  f.n_cols = grid.n_cols;
  std::set<std::string> seen;
  for (const auto& cell : grid.cells)
    if (cell.is_header && !cell.span_member && !cell.text.empty() &&
        seen.insert(cell.text).second)
      f.themes.push_back(cell.text);

  for (int c = 0; c < grid.n_cols; ++c) {
    std::vector<double> values;
    int body_cells = 0;
    for (int r = 0; r < grid.n_rows; ++r) {
      const auto& cell = grid.at(r, c);
      if (cell.is_header) continue;
      ++body_cells;
      if (auto v = text::parse_number(cell.text)) values.push_back(*v);
    }
    if (body_cells == 0 || values.size() * 5 < static_cast<size_t>(body_cells) * 4)
      continue;  // below the 80% threshold
    ColumnStats stats;
    stats.col = c;
    stats.min = *std::min_element(values.begin(), values.end());
    stats.max = *std::max_element(values.begin(), values.end());
    for (double v : values) stats.sum += v;
    stats.mean = stats.sum / static_cast<double>(values.size());
    f.numeric_columns.push_back(stats);
  }
  return f;
}

const char* to_string(TableTaskType t) {
  switch (t) {
    case TableTaskType::Factoid: return "Factoid";
    case TableTaskType::FreeForm: return "FreeForm";
    case TableTaskType::MultipleChoice: return "MultipleChoice";
    case TableTaskType::List: return "List";
    case TableTaskType::YesNo: return "YesNo";
    case TableTaskType::Explanation: return "Explanation";
    case TableTaskType::Comparison: return "Comparison";
    case TableTaskType::Causal: return "Causal";
    case TableTaskType::Computation: return "Computation";
    case TableTaskType::Classification: return "Classification";
    case TableTaskType::TimeSeries: return "TimeSeries";
  }
  return "Factoid";
}

std::optional<TableTaskType> table_task_from_string(const std::string& s) {
  static const std::map<std::string, TableTaskType> names = {
      {"factoid", TableTaskType::Factoid},
      {"freeform", TableTaskType::FreeForm},
      {"free form", TableTaskType::FreeForm},
      {"multiplechoice", TableTaskType::MultipleChoice},
      {"multiple choice", TableTaskType::MultipleChoice},
      {"list", TableTaskType::List},
      {"yesno", TableTaskType::YesNo},
      {"yes/no", TableTaskType::YesNo},
      {"explanation", TableTaskType::Explanation},
      {"comparison", TableTaskType::Comparison},
      {"causal", TableTaskType::Causal},
      {"computation", TableTaskType::Computation},
      {"classification", TableTaskType::Classification},
      {"timeseries", TableTaskType::TimeSeries},
      {"time series", TableTaskType::TimeSeries}};
  auto it = names.find(text::to_lower_ascii(s));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::string build_table_prompt(const std::string& html,
                               const json& template_example) {
  if (text::trim(html).empty()) throw Error("empty html input");
  parse_html_table(html);  // reject tables we cannot ground answers against
  std::string sample = template_example.is_null() ? "" : template_example.dump();
  if (sample.empty() || sample == "null" || sample == "[]" || sample == "{}")
    throw Error("placeholder {template} unfilled");
  return prompts::substitute(prompts::kTableQa,
                             {{"html_code", html}, {"template", sample}});
}

namespace {

std::string norm_cell(const std::string& s) {
  return text::normalize_for_match(
      s, {"，", "。", ",", ".", "！", "!", "？", "?", "：", ":"});
}

bool is_yes_no_answer(const std::string& answer) {
  static const std::set<std::string> forms = {"yes", "no",  "是",   "否",
                                              "是的", "不是", "对", "不对"};
  return forms.count(text::to_lower_ascii(text::trim(answer))) > 0 ||
         forms.count(norm_cell(answer)) > 0;
}

// Aggregates over one numeric line (row or column): sum, mean, min, max
// and every pairwise absolute difference. Needs at least two values.
void collect_aggregates(const std::vector<double>& values,
                        std::vector<double>& out) {
  if (values.size() < 2) return;
  double sum = 0;
  for (double v : values) sum += v;
  out.push_back(sum);
  out.push_back(sum / static_cast<double>(values.size()));
  out.push_back(*std::min_element(values.begin(), values.end()));
  out.push_back(*std::max_element(values.begin(), values.end()));
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      out.push_back(std::fabs(values[i] - values[j]));
}

}  // namespace

VerifyResult verify_table_answer(const QaRecord& record, const TableGrid& grid) {
  if (record.category != Category::table)
    throw Error("verify_table_answer wants a table record");
  auto task = table_task_from_string(record.task_type);
  if (!task) throw Error("unknown task type: " + record.task_type);
  if (record.conversations.empty()) return {Verdict::wrong, "non-empty answer"};
  const std::string& answer = record.conversations.back().text;

  switch (*task) {
    case TableTaskType::FreeForm:
    case TableTaskType::Explanation:
    case TableTaskType::Causal:
    case TableTaskType::Classification:
    case TableTaskType::TimeSeries:
      return {Verdict::unverifiable, ""};
    default:
      break;
  }

  if (*task == TableTaskType::YesNo) {
    if (is_yes_no_answer(answer)) return {Verdict::verified, ""};
    return {Verdict::wrong, "yes or no"};
  }

  if (*task == TableTaskType::Factoid) {
    std::string norm_answer = norm_cell(answer);
    if (norm_answer.empty()) return {Verdict::unverifiable, ""};
    for (const auto& cell : grid.cells)
      if (norm_cell(cell.text) == norm_answer) return {Verdict::verified, ""};
    return {Verdict::wrong, "a table cell value"};
  }

  if (*task == TableTaskType::Computation) {
    auto num = text::extract_first_number(answer);
    if (!num) return {Verdict::unverifiable, ""};
    std::vector<double> truths;
    for (int c = 0; c < grid.n_cols; ++c) {
      std::vector<double> col;
      for (int r = 0; r < grid.n_rows; ++r) {
        const auto& cell = grid.at(r, c);
        if (cell.is_header) continue;
        if (auto v = text::parse_number(cell.text)) col.push_back(*v);
      }
      collect_aggregates(col, truths);
    }
    for (int r = 0; r < grid.n_rows; ++r) {
      std::vector<double> row;
      for (int c = 0; c < grid.n_cols; ++c) {
        const auto& cell = grid.at(r, c);
        if (cell.is_header) continue;
        if (auto v = text::parse_number(cell.text)) row.push_back(*v);
      }
      collect_aggregates(row, truths);
    }
    for (double t : truths)
      if (text::approx_equal(*num, t)) return {Verdict::verified, ""};
    std::string expected = truths.empty() ? "no numeric line in table"
                                          : text::format_double(truths.front());
    double best_gap = -1;
    for (double t : truths) {
      double gap = std::fabs(t - *num);
      if (best_gap < 0 || gap < best_gap) {
        best_gap = gap;
        expected = text::format_double(t);
      }
    }
    return {Verdict::wrong, expected};
  }

  // Comparison / List / MultipleChoice: every answer token must be a cell
  std::set<std::string> cell_texts;
  for (const auto& cell : grid.cells) {
    std::string n = norm_cell(cell.text);
    if (!n.empty()) cell_texts.insert(n);
  }
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : text::decode_utf8(answer)) {
    bool sep = cp == ',' || cp == ';' || cp == '/' || cp == 0xFF0C /* ， */ ||
               cp == 0x3001 /* 、 */ || cp == 0xFF1B /* ； */ || cp == '\n' ||
               cp == 0x548C /* 和 */;
    if (sep) {
      if (!current.empty()) tokens.push_back(current);
      current.clear();
    } else {
      current += text::encode_utf8({cp});
    }
  }
  if (!current.empty()) tokens.push_back(current);
  if (tokens.empty()) return {Verdict::unverifiable, ""};
  for (const auto& token : tokens) {
    std::string n = norm_cell(token);
    if (n.empty()) continue;
    if (!cell_texts.count(n))
      return {Verdict::wrong, "tokens drawn from table cells"};
  }
  return {Verdict::verified, ""};
}

json table_qa_sample_template() {
  return json::array(
      {json{{"human", "问题"}, {"gpt", "答案"}, {"task_type", "Factoid"}}});
}

TableBatch gen_table_qa(const std::string& html, LlmGateway& gateway,
                        const std::string& image_ref) {
  TableGrid grid = parse_html_table(html);
  TableBatch batch;
  batch.prompt = build_table_prompt(html, table_qa_sample_template());

  ChatRequest req;
  req.user_text = batch.prompt;
  req.tag = "tableqa";
  req.temperature = gateway.config().temperature;
  req.max_output_tokens = gateway.config().max_output_tokens;
  ChatResult res = gateway.complete(req);

  json pairs = extract_json_fence(res.text);
  if (!pairs.is_array()) throw Error("table QA response fence is not a JSON array");

  size_t surviving = 0;
  for (const auto& p : pairs) {
    if (!p.is_object() || !p.contains("human") || !p.contains("gpt"))
      throw Error("table QA pair missing human/gpt fields");
    QaRecord rec;
    rec.image_ref = image_ref;
    rec.conversations = {{"human", p["human"].get<std::string>()},
                         {"gpt", p["gpt"].get<std::string>()}};
    rec.id = make_record_id(image_ref, rec.conversations.front().text);
    rec.category = Category::table;
    rec.language = detect_language(rec.conversations);
    rec.provenance.generator = "tableqa";
    rec.provenance.model = gateway.config().model;

    std::string claimed = p.value("task_type", "");
    auto task = table_task_from_string(claimed);
    if (!task) {
      rec.task_type = claimed;
      rec.provenance.validated = false;
      rec.provenance.rejection_reason =
          "unknown task type: " + (claimed.empty() ? "(missing)" : claimed);
    } else {
      rec.task_type = to_string(*task);
      auto verdict = verify_table_answer(rec, grid);
      rec.provenance.validated = verdict.verdict != Verdict::wrong;
      if (!rec.provenance.validated)
        rec.provenance.rejection_reason =
            "wrong answer: expected " + verdict.expected;
      else
        ++surviving;
    }
    batch.records.push_back(std::move(rec));
  }
  batch.under_filled = surviving == 0;
  return batch;
}

}  // namespace docsynth
