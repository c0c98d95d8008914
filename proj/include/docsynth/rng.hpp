#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace docsynth {

// Seeded RNG with hand-rolled value mappings. std::mt19937_64 output is
// fixed by the standard but the distribution classes are not, so every
// mapping here is spelled out to keep streams bit-stable across
// toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // unbiased uniform in [0, n) via rejection
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // inclusive bounds
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; splitmix64 over (state draw, label).
  Rng fork(uint64_t label) {
    uint64_t z = next_u64() + 0x9E3779B97F4A7C15ULL * (label + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace docsynth
