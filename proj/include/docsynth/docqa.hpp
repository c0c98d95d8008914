#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "docsynth/corpus.hpp"
#include "docsynth/layout.hpp"

namespace docsynth {

class LlmGateway;

struct DocQaConfig {
  int min_pairs = 5;
  // Question openers the generator must avoid (guideline wording plus the
  // Chinese forms).
  std::vector<std::string> banned_instruction_prefixes = {
      "Please ask", "Please answer", "In the document",
      "请问", "请回答", "在文档中"};
  // Layout-structure vocabulary that must not leak into instructions or
  // answers.
  std::vector<std::string> banned_layout_words = {
      "布局", "版面", "表格", "图表", "公式", "印章", "区域", "坐标",
      "左上角", "右下角", "layout", "bounding box", "top-left corner",
      "bottom-right corner"};
  // Punctuation dropped (together with all whitespace, after NFKC) before
  // the answer-substring check. Decimal points and signs are kept.
  std::vector<std::string> strip_punctuation = {
      "，", "。", "、", "；", "：", "！", "？", "“", "”", "‘", "’",
      "（", "）", "《", "》", "【", "】", ",", ";", ":", "!", "?",
      "\"", "'", "(", ")"};
};

void validate_config(const DocQaConfig& cfg);

// NFKC + strip whitespace + strip the configured punctuation.
std::string normalize_doc_text(const std::string& s, const DocQaConfig& cfg);

// The generation template wrapped around the layout JSON; byte-stable for
// identical inputs.
std::string build_doc_prompt(const std::string& layout_json,
                             const nlohmann::json& template_example);

// Output-format sample substituted for {template} by generate_doc_qa.
nlohmann::json doc_qa_sample_template();

struct DocValidation {
  bool ok = true;
  std::vector<std::string> reasons;  // every fired rule, not just the first
};

DocValidation validate_doc_qa(const QaRecord& record,
                              const std::string& spliced_text,
                              const std::set<RegionKind>& kinds,
                              const DocQaConfig& cfg);

struct DocBatch {
  std::vector<QaRecord> records;  // validated and rejected, in response order
  bool under_filled = false;      // fewer than min_pairs survived validation
  std::string prompt;             // as sent, for audit
};

DocBatch generate_doc_qa(const LayoutDocument& doc, const std::string& image_ref,
                         const DocQaConfig& cfg, LlmGateway& gateway,
                         uint64_t rng_seed);

struct CoverageReport {
  std::map<std::string, size_t> counts;  // per present region kind
  std::vector<std::string> gaps;         // present kinds with zero records
};

CoverageReport coverage_report(const std::vector<QaRecord>& records,
                               const std::set<RegionKind>& kinds);

}  // namespace docsynth
