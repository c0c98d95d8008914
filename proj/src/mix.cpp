#include "docsynth/mix.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/rng.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

MixPlan solve_weights(const std::vector<SourceSpec>& sources, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error("target synthetic fraction must lie strictly in (0, 1)");
  // per-source multipliers shift weight within a class; the common
  // synthetic factor is solved over the multiplier-adjusted totals so the
  // expected fraction still lands on p
  double public_total = 0, synthetic_total = 0;
  for (const auto& s : sources) {
    if (s.size < 1) throw Error("source " + s.name + " has size 0");
    if (s.multiplier <= 0)
      throw Error("source " + s.name + " has non-positive multiplier");
    double mass = s.multiplier * static_cast<double>(s.size);
    (s.is_synthetic ? synthetic_total : public_total) += mass;
  }
  if (synthetic_total == 0) throw Error("no synthetic source in the mix");
  if (public_total == 0) throw Error("no public source in the mix");

  const double natural = synthetic_total / (public_total + synthetic_total);
  // exact fixed point: requesting the natural share means no re-weighting
  const double r = (p == natural)
                       ? 1.0
                       : (p * public_total) / ((1.0 - p) * synthetic_total);

  MixPlan plan;
  plan.sources = sources;
  plan.target_synthetic_fraction = p;
  for (auto& s : plan.sources)
    s.weight = s.multiplier * (s.is_synthetic ? r : 1.0);
  plan.epoch_length = public_total + r * synthetic_total;
  return plan;
}

double expected_synthetic_fraction(const MixPlan& plan) {
  double weighted_synth = 0, weighted_total = 0;
  for (const auto& s : plan.sources) {
    double contribution = s.weight * static_cast<double>(s.size);
    weighted_total += contribution;
    if (s.is_synthetic) weighted_synth += contribution;
  }
  return weighted_total > 0 ? weighted_synth / weighted_total : 0.0;
}

std::vector<SampleRef> sample_epoch(const MixPlan& plan, uint64_t seed) {
  Rng rng(seed);
  std::vector<SampleRef> stream;
  for (size_t si = 0; si < plan.sources.size(); ++si) {
    const auto& src = plan.sources[si];
    if (src.weight <= 0) throw Error("source " + src.name + " has non-positive weight");
    auto whole = static_cast<size_t>(src.weight);
    double frac = src.weight - static_cast<double>(whole);
    for (size_t idx = 0; idx < src.size; ++idx) {
      size_t copies = whole + ((frac > 0 && rng.bernoulli(frac)) ? 1 : 0);
      for (size_t c = 0; c < copies; ++c) stream.push_back({si, idx});
    }
  }
  rng.shuffle(stream);
  return stream;
}

std::map<std::string, double> empirical_fractions(
    const std::vector<SampleRef>& stream, const MixPlan& plan) {
  std::map<std::string, double> fractions;
  if (stream.empty()) return fractions;
  std::vector<size_t> counts(plan.sources.size(), 0);
  for (const auto& ref : stream) {
    if (ref.source >= plan.sources.size()) throw Error("stream references unknown source");
    ++counts[ref.source];
  }
  for (size_t i = 0; i < plan.sources.size(); ++i)
    fractions[plan.sources[i].name] =
        static_cast<double>(counts[i]) / static_cast<double>(stream.size());
  return fractions;
}

double empirical_synthetic_fraction(const std::vector<SampleRef>& stream,
                                    const MixPlan& plan) {
  if (stream.empty()) return 0.0;
  size_t synth = 0;
  for (const auto& ref : stream)
    if (plan.sources.at(ref.source).is_synthetic) ++synth;
  return static_cast<double>(synth) / static_cast<double>(stream.size());
}

MixPlan plan_from_json(const json& j) {
  std::vector<SourceSpec> sources;
  for (const auto& s : j.at("sources")) {
    SourceSpec spec;
    spec.name = s.at("name").get<std::string>();
    spec.size = s.at("size").get<size_t>();
    spec.is_synthetic = s.at("is_synthetic").get<bool>();
    spec.multiplier = s.value("weight_multiplier", 1.0);
    sources.push_back(std::move(spec));
  }
  return solve_weights(sources, j.at("target_synthetic_fraction").get<double>());
}

ordered_json plan_to_json(const MixPlan& plan) {
  ordered_json sources = ordered_json::array();
  for (const auto& s : plan.sources)
    sources.push_back(ordered_json{{"name", s.name},
                                   {"size", s.size},
                                   {"is_synthetic", s.is_synthetic},
                                   {"weight_multiplier", s.multiplier},
                                   {"weight", s.weight}});
  return ordered_json{{"sources", sources},
                      {"target_synthetic_fraction", plan.target_synthetic_fraction},
                      {"epoch_length", plan.epoch_length}};
}

MixPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open plan: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("bad plan file " + path.string() + ": " + e.what());
  }
  return plan_from_json(j);
}

}  // namespace docsynth
