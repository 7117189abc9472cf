#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "dermakit/digest.hpp"

namespace dermakit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random source. std::mt19937_64 has a fully specified
/// sequence, but the standard distributions do not, so all sampling here
/// is hand-rolled to keep outputs identical across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller. No spare caching, so the consumed
  /// engine state per call is fixed.
  double normal() {
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derives an independent stream seed from a base seed and a purpose tag.
  /// Every consumer of randomness in the toolkit pulls its seed through
  /// this, so one --seed flag pins the whole pipeline.
  static std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
    return splitmix64(seed ^ splitmix64(fnv1a64(tag)));
  }

  static std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                              std::uint64_t index) {
    return splitmix64(derive(seed, tag) ^ splitmix64(index));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dermakit
