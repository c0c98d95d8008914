#include "docsynth/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "docsynth/errors.hpp"
#include "docsynth/rng.hpp"

namespace docsynth {

void validate_policy(const ResizePolicy& p) {
  if (p.patch_px <= 0) throw ConfigError("patch_px must be positive");
  if (p.train_threshold_min <= 0 || p.train_threshold_max < p.train_threshold_min)
    throw ConfigError("train thresholds must satisfy 0 < min <= max");
  if (p.infer_upscale_min <= 0 || p.infer_upscale_max < p.infer_upscale_min)
    throw ConfigError("infer upscale range must satisfy 0 < min <= max");
  if (p.low_res_cutoff <= 0) throw ConfigError("low_res_cutoff must be positive");
  if (p.max_tokens && *p.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
}

namespace {

// Nearest multiple of `patch`, floored at one patch.
int align(double side, int patch) {
  long long units = std::llround(side / patch);
  return static_cast<int>(std::max(1LL, units) * patch);
}

int align_down(double side, int patch) {
  long long units = static_cast<long long>(side / patch);
  return static_cast<int>(std::max(1LL, units) * patch);
}

// Shrink proportionally until the patch grid fits under max_tokens.
std::pair<int, int> cap_tokens(std::pair<int, int> dims, const ResizePolicy& policy) {
  if (!policy.max_tokens) return dims;
  const int patch = policy.patch_px;
  auto [w2, h2] = dims;
  long long tokens = static_cast<long long>(w2 / patch) * (h2 / patch);
  while (tokens > *policy.max_tokens && (w2 > patch || h2 > patch)) {
    double shrink = std::sqrt(static_cast<double>(*policy.max_tokens) / tokens);
    int nw = align_down(w2 * shrink, patch);
    int nh = align_down(h2 * shrink, patch);
    if (nw == w2 && nh == h2) {
      if (w2 >= h2 && w2 > patch) nw = w2 - patch;
      else if (h2 > patch) nh = h2 - patch;
    }
    w2 = nw;
    h2 = nh;
    tokens = static_cast<long long>(w2 / patch) * (h2 / patch);
  }
  return {w2, h2};
}

}  // namespace

std::pair<int, int> resize_to_threshold(int w, int h, double threshold,
                                        int patch_px) {
  double longest = std::max(w, h);
  double scale = std::min(1.0, threshold / longest);
  int w2 = align(w * scale, patch_px);
  int h2 = align(h * scale, patch_px);
  // nearest rounding must not push a side past the threshold
  if (w2 > threshold && w2 > patch_px) w2 = align_down(threshold, patch_px);
  if (h2 > threshold && h2 > patch_px) h2 = align_down(threshold, patch_px);
  return {w2, h2};
}

std::pair<int, int> resize_by_factor(int w, int h, double factor, int patch_px) {
  return {align(w * factor, patch_px), align(h * factor, patch_px)};
}

std::pair<int, int> smart_resize(int w, int h, const ResizePolicy& policy,
                                 ResizeMode mode, uint64_t rng_seed) {
  validate_policy(policy);
  if (w < 1 || h < 1) throw Error("image dimensions must be >= 1");
  Rng rng(rng_seed);
  const int patch = policy.patch_px;

  if (mode == ResizeMode::train) {
    double threshold = rng.uniform(policy.train_threshold_min,
                                   policy.train_threshold_max);
    return cap_tokens(resize_to_threshold(w, h, threshold, patch), policy);
  }

  double factor = 1.0;
  if (std::max(w, h) >= policy.low_res_cutoff)
    factor = rng.uniform(policy.infer_upscale_min, policy.infer_upscale_max);
  return cap_tokens(resize_by_factor(w, h, factor, patch), policy);
}

long long token_count(int w2, int h2, const ResizePolicy& policy) {
  validate_policy(policy);
  if (w2 <= 0 || h2 <= 0 || w2 % policy.patch_px != 0 || h2 % policy.patch_px != 0)
    throw Error("dimensions must be positive multiples of " +
                std::to_string(policy.patch_px));
  return static_cast<long long>(w2 / policy.patch_px) *
         static_cast<long long>(h2 / policy.patch_px);
}

ResolutionClass classify_resolution(int w, int h, const ResizePolicy& policy) {
  validate_policy(policy);
  if (w < 1 || h < 1) throw Error("image dimensions must be >= 1");
  return std::max(w, h) < policy.low_res_cutoff ? ResolutionClass::low
                                                : ResolutionClass::conventional;
}

}  // namespace docsynth
