#include <algorithm>
#include <cmath>
#include <set>

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

// Numeric view of a data table: row labels from column 0, one numeric
// column per series.
struct TableView {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<double>> cols;  // cols[c][r]
};

TableView view_of(const CsvTable& table) {
  if (table.header.size() < 2) throw Error("data table has no value columns");
  TableView v;
  for (size_t c = 1; c < table.header.size(); ++c) v.col_labels.push_back(table.header[c]);
  v.cols.resize(v.col_labels.size());
  for (const auto& row : table.rows) {
    v.row_labels.push_back(row[0]);
    for (size_t c = 1; c < row.size(); ++c) {
      auto parsed = text::parse_number(row[c]);
      if (!parsed)
        throw Error("non-numeric table cell \"" + row[c] + "\"");
      v.cols[c - 1].push_back(*parsed);
    }
  }
  if (v.row_labels.empty()) throw Error("data table has no rows");
  return v;
}

// Ground-truth semantics per verifiable task tag, brute-forced from the
// table. Kept deliberately simple so an independent oracle can restate it.
struct GroundTruth {
  std::vector<double> numbers;       // admissible numeric answers
  std::vector<std::string> labels;   // admissible label answers
  double representative = 0;         // shown in wrong(expected)
  std::string representative_label;
};

GroundTruth ground_truth(const std::string& task, const TableView& v) {
  GroundTruth gt;
  const size_t n_rows = v.row_labels.size();
  const size_t n_cols = v.cols.size();
  auto col_values = [&](size_t c) { return v.cols[c]; };
  auto row_values = [&](size_t r) {
    std::vector<double> out;
    for (size_t c = 0; c < n_cols; ++c) out.push_back(v.cols[c][r]);
    return out;
  };

  // a row or column yields an aggregate only when it holds at least two
  // values; a one-value line would collapse every aggregate task into a
  // plain value lookup
  const bool cols_count = n_rows >= 2;
  const bool rows_count = n_cols >= 2;

  if (task == "value_lookup") {
    for (size_t c = 0; c < n_cols; ++c)
      for (double x : v.cols[c]) gt.numbers.push_back(x);
    gt.representative = gt.numbers.front();
  } else if (task == "extremum_max" || task == "extremum_min") {
    const bool want_max = task == "extremum_max";
    double global = v.cols[0][0];
    for (size_t c = 0; c < n_cols; ++c)
      for (double x : v.cols[c])
        global = want_max ? std::max(global, x) : std::min(global, x);
    if (cols_count)
      for (size_t c = 0; c < n_cols; ++c) {
        auto vals = col_values(c);
        gt.numbers.push_back(want_max
                                 ? *std::max_element(vals.begin(), vals.end())
                                 : *std::min_element(vals.begin(), vals.end()));
      }
    if (rows_count)
      for (size_t r = 0; r < n_rows; ++r) {
        auto vals = row_values(r);
        gt.numbers.push_back(want_max
                                 ? *std::max_element(vals.begin(), vals.end())
                                 : *std::min_element(vals.begin(), vals.end()));
      }
    gt.numbers.push_back(global);
    gt.representative = global;
  } else if (task == "sum" || task == "average") {
    const bool mean = task == "average";
    double global_sum = 0;
    size_t global_n = 0;
    for (size_t c = 0; c < n_cols; ++c) {
      double s = 0;
      for (double x : v.cols[c]) s += x;
      if (cols_count)
        gt.numbers.push_back(mean ? s / static_cast<double>(n_rows) : s);
      global_sum += s;
      global_n += n_rows;
    }
    if (rows_count)
      for (size_t r = 0; r < n_rows; ++r) {
        double s = 0;
        for (double x : row_values(r)) s += x;
        gt.numbers.push_back(mean ? s / static_cast<double>(n_cols) : s);
      }
    if (global_n >= 2)
      gt.numbers.push_back(mean ? global_sum / static_cast<double>(global_n)
                                : global_sum);
    gt.representative =
        mean ? global_sum / static_cast<double>(global_n) : global_sum;
  } else if (task == "count") {
    gt.numbers.push_back(static_cast<double>(n_rows));
    gt.numbers.push_back(static_cast<double>(n_cols));
    gt.numbers.push_back(static_cast<double>(n_rows * n_cols));
    gt.representative = static_cast<double>(n_rows);
  } else if (task == "comparison") {
    // admissible labels: arg-extremes of any column, any row, and global
    double best = v.cols[0][0], worst = v.cols[0][0];
    size_t best_r = 0, best_c = 0, worst_r = 0, worst_c = 0;
    for (size_t c = 0; c < n_cols; ++c) {
      size_t amax = 0, amin = 0;
      for (size_t r = 0; r < n_rows; ++r) {
        if (v.cols[c][r] > v.cols[c][amax]) amax = r;
        if (v.cols[c][r] < v.cols[c][amin]) amin = r;
        if (v.cols[c][r] > best) { best = v.cols[c][r]; best_r = r; best_c = c; }
        if (v.cols[c][r] < worst) { worst = v.cols[c][r]; worst_r = r; worst_c = c; }
      }
      if (cols_count) {
        gt.labels.push_back(v.row_labels[amax]);
        gt.labels.push_back(v.row_labels[amin]);
      }
    }
    if (rows_count)
      for (size_t r = 0; r < n_rows; ++r) {
        size_t amax = 0, amin = 0;
        for (size_t c = 0; c < n_cols; ++c) {
          if (v.cols[c][r] > v.cols[amax][r]) amax = c;
          if (v.cols[c][r] < v.cols[amin][r]) amin = c;
        }
        gt.labels.push_back(v.col_labels[amax]);
        gt.labels.push_back(v.col_labels[amin]);
      }
    gt.labels.push_back(v.row_labels[best_r]);
    gt.labels.push_back(v.col_labels[best_c]);
    gt.labels.push_back(v.row_labels[worst_r]);
    gt.labels.push_back(v.col_labels[worst_c]);
    gt.representative_label = v.row_labels[best_r];
    // numeric form: |a-b| within one column or one row
    for (size_t c = 0; c < n_cols; ++c)
      for (size_t i = 0; i < n_rows; ++i)
        for (size_t j = 0; j < i; ++j)
          gt.numbers.push_back(std::fabs(v.cols[c][i] - v.cols[c][j]));
    for (size_t r = 0; r < n_rows; ++r)
      for (size_t i = 0; i < n_cols; ++i)
        for (size_t j = 0; j < i; ++j)
          gt.numbers.push_back(std::fabs(v.cols[i][r] - v.cols[j][r]));
  } else {
    throw Error("not a verifiable task: " + task);
  }
  return gt;
}

bool is_verifiable_task(const std::string& task) {
  return task == "value_lookup" || task == "extremum_max" ||
         task == "extremum_min" || task == "sum" || task == "average" ||
         task == "count" || task == "comparison";
}

std::string norm_label(const std::string& s) {
  return text::normalize_for_match(s, {"，", "。", ",", ".", "!", "？", "?"});
}

}  // namespace

VerifyResult verify_chart_answer(const QaRecord& record, const CsvTable& table) {
  if (record.category != Category::chart)
    throw Error("verify_chart_answer wants a chart record");
  if (!is_verifiable_task(record.task_type)) return {Verdict::unverifiable, ""};
  if (record.conversations.empty()) return {Verdict::wrong, "non-empty answer"};

  const std::string& answer = record.conversations.back().text;
  TableView v = view_of(table);
  GroundTruth gt = ground_truth(record.task_type, v);

  auto num = text::extract_first_number(answer);
  if (num)
    for (double truth : gt.numbers)
      if (text::approx_equal(*num, truth)) return {Verdict::verified, ""};

  if (!gt.labels.empty()) {
    std::string norm_answer = norm_label(answer);
    for (const auto& label : gt.labels) {
      std::string norm = norm_label(label);
      if (!norm.empty() && norm_answer.find(norm) != std::string::npos)
        return {Verdict::verified, ""};
    }
  }

  if (!num && gt.labels.empty()) return {Verdict::unverifiable, ""};
  if (!num && !gt.labels.empty()) {
    // label task with no recognizable label in the answer
    std::string norm_answer = norm_label(answer);
    bool mentions_known = false;
    for (const auto& l : v.row_labels)
      if (!norm_label(l).empty() && norm_answer.find(norm_label(l)) != std::string::npos)
        mentions_known = true;
    for (const auto& l : v.col_labels)
      if (!norm_label(l).empty() && norm_answer.find(norm_label(l)) != std::string::npos)
        mentions_known = true;
    if (!mentions_known) return {Verdict::unverifiable, ""};
  }

  std::string expected = gt.representative_label.empty()
                             ? text::format_double(gt.representative)
                             : gt.representative_label;
  return {Verdict::wrong, expected};
}

std::vector<QaRecord> template_chart_qa(const ChartSpec& spec,
                                        const CsvTable& table,
                                        const TaskMatrix& matrix,
                                        uint64_t rng_seed,
                                        const std::string& image_ref) {
  validate_spec(spec);
  validate_matrix(matrix);
  TableView v = view_of(table);
  Rng rng(rng_seed);
  const bool zh = spec.locale == Language::zh;
  const size_t n_rows = v.row_labels.size();
  const size_t n_cols = v.cols.size();

  std::vector<QaRecord> records;
  for (const auto& task : matrix.tasks_for(spec.chart_type)) {
    size_t c = rng.below(n_cols);
    size_t r = rng.below(n_rows);
    const std::string& col = v.col_labels[c];
    const std::string& row = v.row_labels[r];
    std::string question, answer;

    if (task == "value_lookup") {
      question = zh ? col + "在" + row + "处的数值是多少？"
                    : "What is the value of " + col + " at " + row + "?";
      answer = text::format_double(v.cols[c][r]);
    } else if (task == "extremum_max") {
      question = zh ? col + "的最大值是多少？"
                    : "What is the maximum value of " + col + "?";
      answer = text::format_double(
          *std::max_element(v.cols[c].begin(), v.cols[c].end()));
    } else if (task == "extremum_min") {
      question = zh ? col + "的最小值是多少？"
                    : "What is the minimum value of " + col + "?";
      answer = text::format_double(
          *std::min_element(v.cols[c].begin(), v.cols[c].end()));
    } else if (task == "sum") {
      double s = 0;
      for (double x : v.cols[c]) s += x;
      question = zh ? col + "的总和是多少？" : "What is the total of " + col + "?";
      answer = text::format_double(s);
    } else if (task == "average") {
      double s = 0;
      for (double x : v.cols[c]) s += x;
      question = zh ? col + "的平均值是多少？"
                    : "What is the average of " + col + "?";
      answer = text::format_double(s / static_cast<double>(n_rows));
    } else if (task == "count") {
      question = zh ? "图中共有多少个数据点？"
                    : "How many data points does the chart show?";
      answer = text::format_double(static_cast<double>(n_rows));
    } else if (task == "comparison") {
      size_t amax = 0;
      for (size_t i = 1; i < n_rows; ++i)
        if (v.cols[c][i] > v.cols[c][amax]) amax = i;
      question = zh ? "在" + col + "中，哪一项的数值最大？"
                    : "Which item has the largest " + col + " value?";
      answer = v.row_labels[amax];
    } else if (task == "trend") {
      bool rising = v.cols[c].back() >= v.cols[c].front();
      question = zh ? "请描述" + col + "的整体趋势。"
                    : "Describe the overall trend of " + col + ".";
      answer = zh ? (rising ? "整体呈上升趋势。" : "整体呈下降趋势。")
                  : (rising ? "The values trend upward overall."
                            : "The values trend downward overall.");
    } else if (task == "description") {
      question = zh ? "这张图展示了什么内容？" : "What does this chart show?";
      answer = zh ? "图中展示了" + spec.topic + "相关的数据分布。"
                  : "The chart shows data about " + spec.topic + ".";
    } else {
      continue;
    }

    QaRecord rec;
    rec.image_ref = image_ref;
    rec.conversations = {{"human", question}, {"gpt", answer}};
    rec.id = make_record_id(image_ref, question);
    rec.category = Category::chart;
    rec.language = zh ? Language::zh : Language::en;
    rec.task_type = task;
    rec.provenance.generator = "chart-template";
    rec.provenance.rng_seed = rng_seed;
    rec.provenance.model = "none";
    auto verdict = verify_chart_answer(rec, table);
    rec.provenance.validated = verdict.verdict != Verdict::wrong;
    if (!rec.provenance.validated)
      rec.provenance.rejection_reason = "wrong answer: expected " + verdict.expected;
    records.push_back(std::move(rec));
  }
  return records;
}

json chart_qa_sample_template(const std::string& first_task) {
  return json::array(
      {json{{"human", "问题"}, {"gpt", "答案"}, {"task_type", first_task}}});
}

std::string build_chart_qa_prompt(const ChartSpec& spec, const CsvTable& table,
                                  const TaskMatrix& matrix) {
  const auto& tasks = matrix.tasks_for(spec.chart_type);
  return prompts::substitute(
      prompts::kChartQa,
      {{"chart_type", to_string(spec.chart_type)},
       {"code", spec_to_json(spec).dump()},
       {"table_data", to_csv(table)},
       {"task_types", text::join(tasks, ", ")},
       {"template", chart_qa_sample_template(tasks.front()).dump()}});
}

std::vector<QaRecord> gen_chart_qa(const ChartSpec& spec, const CsvTable& table,
                                   const TaskMatrix& matrix, LlmGateway& gateway,
                                   const std::string& image_ref) {
  validate_spec(spec);
  validate_matrix(matrix);
  const auto& tasks = matrix.tasks_for(spec.chart_type);

  ChatRequest req;
  req.user_text = build_chart_qa_prompt(spec, table, matrix);
  req.tag = "chartqa";
  req.temperature = gateway.config().temperature;
  req.max_output_tokens = gateway.config().max_output_tokens;
  ChatResult res = gateway.complete(req);

  json pairs = extract_json_fence(res.text);
  if (!pairs.is_array()) throw Error("chart QA response fence is not a JSON array");

  std::set<std::string> allowed(tasks.begin(), tasks.end());
  std::vector<QaRecord> records;
  for (const auto& p : pairs) {
    if (!p.is_object() || !p.contains("human") || !p.contains("gpt"))
      throw Error("chart QA pair missing human/gpt fields");
    QaRecord rec;
    rec.image_ref = image_ref;
    rec.conversations = {{"human", p["human"].get<std::string>()},
                         {"gpt", p["gpt"].get<std::string>()}};
    rec.id = make_record_id(image_ref, rec.conversations.front().text);
    rec.category = Category::chart;
    rec.language = detect_language(rec.conversations);
    rec.task_type = p.value("task_type", "");
    rec.provenance.generator = "chart-llm";
    rec.provenance.model = gateway.config().model;

    if (!allowed.count(rec.task_type)) {
      rec.provenance.validated = false;
      rec.provenance.rejection_reason = "task type not allowed: " +
                                        (rec.task_type.empty() ? "(missing)"
                                                               : rec.task_type);
    } else {
      auto verdict = verify_chart_answer(rec, table);
      rec.provenance.validated = verdict.verdict != Verdict::wrong;
      if (!rec.provenance.validated)
        rec.provenance.rejection_reason =
            "wrong answer: expected " + verdict.expected;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace docsynth
