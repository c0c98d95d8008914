#pragma once

#include <cstdint>
#include <optional>
#include <utility>

namespace docsynth {

// Patch-aligned resize geometry. Train mode draws a per-image longest-side
// threshold from [train_threshold_min, train_threshold_max]; inference
// upscales conventional-resolution images by a factor from
// [infer_upscale_min, infer_upscale_max] and leaves low-resolution images
// untouched apart from patch alignment.
struct ResizePolicy {
  int patch_px = 28;
  int train_threshold_min = 512;
  int train_threshold_max = 768;
  double infer_upscale_min = 1.1;
  double infer_upscale_max = 1.3;
  int low_res_cutoff = 448;  // longest side below this keeps its size
  std::optional<long long> max_tokens;
};

enum class ResizeMode { train, infer };
enum class ResolutionClass { conventional, low };

void validate_policy(const ResizePolicy& policy);

// Returns (w2, h2): positive multiples of patch_px, aspect ratio preserved
// within one patch of rounding per side. Deterministic for a given
// (w, h, policy, mode, seed).
std::pair<int, int> smart_resize(int w, int h, const ResizePolicy& policy,
                                 ResizeMode mode, uint64_t rng_seed);

// Pure geometry behind the two modes, exposed so the arithmetic can be
// pinned against hand-worked values.
//   threshold: scale so the longest side fits, round each side to the
//   nearest patch multiple, never letting it exceed the threshold.
std::pair<int, int> resize_to_threshold(int w, int h, double threshold,
                                        int patch_px);
//   factor: scale both sides, round to the nearest patch multiple.
std::pair<int, int> resize_by_factor(int w, int h, double factor, int patch_px);

// (w2/patch) * (h2/patch); rejects sides that are not patch-aligned.
long long token_count(int w2, int h2, const ResizePolicy& policy);

ResolutionClass classify_resolution(int w, int h, const ResizePolicy& policy);

}  // namespace docsynth
