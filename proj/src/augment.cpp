#include "docsynth/augment.hpp"

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

void validate_policy(const AugmentPolicy& policy) {
  if (policy.max_ocr_chars <= 0) throw ConfigError("max_ocr_chars must be positive");
  if (policy.min_mean_confidence < 0.0 || policy.min_mean_confidence > 1.0)
    throw ConfigError("min_mean_confidence must be in [0, 1]");
  if (policy.always && policy.never)
    throw ConfigError("always and never overrides are mutually exclusive");
}

bool should_augment(const std::string& ocr_text, double mean_confidence,
                    const AugmentPolicy& policy) {
  validate_policy(policy);
  if (policy.never) return false;
  if (policy.always) return true;
  size_t chars = text::codepoint_count(ocr_text);
  return chars > 0 && chars <= static_cast<size_t>(policy.max_ocr_chars) &&
         mean_confidence >= policy.min_mean_confidence;
}

std::string augment_question(const std::string& question,
                             const std::string& ocr_text) {
  if (question.empty()) throw Error("empty question");
  if (text::starts_with(question, kOcrContextPrefix))
    throw Error("question already augmented");
  return kOcrContextPrefix + "\n```ocr\n" + ocr_text + "\n```\n" + question;
}

}  // namespace docsynth
