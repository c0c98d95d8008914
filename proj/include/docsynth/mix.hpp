#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace docsynth {

struct SourceSpec {
  std::string name;
  size_t size = 0;
  bool is_synthetic = false;
  double multiplier = 1.0;  // per-source override hook, applied pre-solve
  double weight = 1.0;      // solved repetition factor
};

// Weighted sources with a target synthetic fraction. Public sources keep
// weight 1; synthetic sources are over-sampled (never dropped) so the
// expected synthetic share of an epoch equals the target.
struct MixPlan {
  std::vector<SourceSpec> sources;
  double target_synthetic_fraction = 0.12;
  double epoch_length = 0;  // expected repetition-adjusted sample count
};

// Closed form: with public total P and synthetic total S, the common
// synthetic factor r solves (r*S) / (P + r*S) = p.
MixPlan solve_weights(const std::vector<SourceSpec>& sources, double p);

// Expected synthetic share of an epoch drawn from this plan.
double expected_synthetic_fraction(const MixPlan& plan);

struct SampleRef {
  size_t source = 0;  // index into plan.sources
  size_t index = 0;   // record index within the source
  bool operator==(const SampleRef&) const = default;
};

// Deterministic epoch stream: each record appears floor(r) times plus one
// Bernoulli(frac(r)) extra pass, then a seeded global shuffle.
std::vector<SampleRef> sample_epoch(const MixPlan& plan, uint64_t seed);

std::map<std::string, double> empirical_fractions(
    const std::vector<SampleRef>& stream, const MixPlan& plan);

double empirical_synthetic_fraction(const std::vector<SampleRef>& stream,
                                    const MixPlan& plan);

MixPlan plan_from_json(const nlohmann::json& j);
nlohmann::ordered_json plan_to_json(const MixPlan& plan);
MixPlan load_plan(const std::filesystem::path& path);

}  // namespace docsynth
