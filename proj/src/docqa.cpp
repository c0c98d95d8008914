#include "docsynth/docqa.hpp"

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/prompts.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;

void validate_config(const DocQaConfig& cfg) {
  if (cfg.min_pairs < 1) throw ConfigError("min_pairs must be >= 1");
}

std::string normalize_doc_text(const std::string& s, const DocQaConfig& cfg) {
  return text::normalize_for_match(s, cfg.strip_punctuation);
}

std::string build_doc_prompt(const std::string& layout_json,
                             const json& template_example) {
  parse_layout(layout_json);  // reject malformed layout up front
  std::string sample = template_example.is_null() ? "" : template_example.dump();
  if (sample.empty() || sample == "null" || sample == "[]" || sample == "{}")
    throw Error("placeholder {template} unfilled");
  return prompts::substitute(prompts::kDocQa, {{"json_string", layout_json},
                                               {"template", sample}});
}

DocValidation validate_doc_qa(const QaRecord& record,
                              const std::string& spliced_text,
                              const std::set<RegionKind>& kinds,
                              const DocQaConfig& cfg) {
  DocValidation v;
  auto fire = [&](std::string reason) {
    v.ok = false;
    v.reasons.push_back(std::move(reason));
  };
  if (record.conversations.size() < 2) {
    fire("incomplete conversation");
    return v;
  }
  const std::string& instruction = record.conversations.front().text;
  const std::string& answer = record.conversations.back().text;
  if (instruction.empty()) fire("empty instruction");
  if (answer.empty()) fire("empty answer");

  const std::string norm_answer = normalize_doc_text(answer, cfg);
  const std::string norm_text = normalize_doc_text(spliced_text, cfg);
  if (!norm_answer.empty() && norm_text.find(norm_answer) == std::string::npos)
    fire("answer not grounded");

  for (const auto& prefix : cfg.banned_instruction_prefixes)
    if (!prefix.empty() && text::starts_with(instruction, prefix))
      fire("banned instruction prefix: " + prefix);

  for (const auto& word : cfg.banned_layout_words) {
    if (word.empty()) continue;
    if (instruction.find(word) != std::string::npos ||
        answer.find(word) != std::string::npos)
      fire("layout structure wording: " + word);
  }

  if (!record.task_type.empty()) {
    auto kind = region_kind_from_string(record.task_type);
    if (kind && !kinds.count(*kind))
      fire("region kind not present: " + record.task_type);
  }
  return v;
}

json doc_qa_sample_template() {
  return json::array(
      {json{{"human", "问题"}, {"gpt", "答案"}, {"kind", "printed_text"}}});
}

DocBatch generate_doc_qa(const LayoutDocument& doc, const std::string& image_ref,
                         const DocQaConfig& cfg, LlmGateway& gateway,
                         uint64_t rng_seed) {
  validate_config(cfg);
  const std::string layout_json = serialize_layout(doc);

  DocBatch batch;
  batch.prompt = build_doc_prompt(layout_json, doc_qa_sample_template());

  ChatRequest req;
  req.user_text = batch.prompt;
  req.tag = "docqa";
  req.temperature = gateway.config().temperature;
  req.max_output_tokens = gateway.config().max_output_tokens;
  ChatResult res = gateway.complete(req);

  json pairs = extract_json_fence(res.text);
  if (!pairs.is_array()) throw Error("doc QA response fence is not a JSON array");

  const std::string spliced = splice_text(doc);
  const auto kinds = kinds_present(doc);
  size_t surviving = 0;
  for (const auto& p : pairs) {
    if (!p.is_object() || !p.contains("human") || !p.contains("gpt"))
      throw Error("doc QA pair missing human/gpt fields");
    QaRecord r;
    r.image_ref = image_ref;
    r.conversations = {{"human", p["human"].get<std::string>()},
                       {"gpt", p["gpt"].get<std::string>()}};
    r.id = make_record_id(image_ref, r.conversations.front().text);
    r.category = Category::doc;
    r.language = detect_language(r.conversations);
    if (p.contains("kind") && p["kind"].is_string())
      r.task_type = p["kind"].get<std::string>();
    r.provenance.generator = "docqa";
    r.provenance.rng_seed = rng_seed;
    r.provenance.model = gateway.config().model;

    auto verdict = validate_doc_qa(r, spliced, kinds, cfg);
    r.provenance.validated = verdict.ok;
    if (!verdict.ok) r.provenance.rejection_reason = text::join(verdict.reasons, "; ");
    else ++surviving;
    batch.records.push_back(std::move(r));
  }
  batch.under_filled = surviving < static_cast<size_t>(cfg.min_pairs);
  return batch;
}

CoverageReport coverage_report(const std::vector<QaRecord>& records,
                               const std::set<RegionKind>& kinds) {
  CoverageReport report;
  for (RegionKind k : kinds) report.counts[to_string(k)] = 0;
  for (const auto& r : records) {
    if (!r.provenance.validated) continue;
    auto kind = region_kind_from_string(r.task_type);
    if (kind && kinds.count(*kind)) ++report.counts[to_string(*kind)];
  }
  for (const auto& [kind, count] : report.counts)
    if (count == 0) report.gaps.push_back(kind);
  return report;
}

}  // namespace docsynth
