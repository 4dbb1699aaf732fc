#pragma once

#include <cstdint>

#include "sparsek/normal.hpp"

namespace sparsek {

// SplitMix64 generator. Self-contained so that sampled values are identical
// across standard libraries; Gaussians go through the tail quantile rather
// than std::normal_distribution for the same reason.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Stream `index` of a master seed. All sampling in the library addresses
  // randomness as (seed, index) pairs through this function.
  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(mix(master + 0x9e3779b97f4a7c15ull * (index + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform strictly inside (0,1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() { return gaussian_tail_inv(uniform01()); }

  // Standard normal conditioned on being >= t, via inverse CDF on the tail.
  double truncated_gaussian_above(double t) {
    return gaussian_tail_inv_log(std::log(uniform01()) + gaussian_tail_log(t));
  }

  int uniform_int(int n) {
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % static_cast<std::uint64_t>(n);
    std::uint64_t x = next();
    while (x >= bound) x = next();
    return static_cast<int>(x % static_cast<std::uint64_t>(n));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace sparsek
