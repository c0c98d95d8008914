#pragma once

#include <string>

namespace docsynth {

// Exact instruction prefix prepended at inference time (golden constant,
// trailing space included).
inline const std::string kOcrContextPrefix =
    "Use the image and the OCR result as context and answer the following "
    "question: ";

// Gate for "clear and limited text": short OCR output with high mean
// confidence. Both proxies are configurable.
struct AugmentPolicy {
  int max_ocr_chars = 2000;          // budget in codepoints
  double min_mean_confidence = 0.9;  // in [0, 1]
  bool always = false;
  bool never = false;
};

void validate_policy(const AugmentPolicy& policy);

bool should_augment(const std::string& ocr_text, double mean_confidence,
                    const AugmentPolicy& policy);

// prefix + fenced OCR block + question. Refuses empty questions and
// questions that already carry the prefix.
std::string augment_question(const std::string& question,
                             const std::string& ocr_text);

}  // namespace docsynth
