#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "dflrb/errors.hpp"

namespace dflrb {

// splitmix64 step; used for seeding and for deriving stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2ca9f6b0ba7ULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and up to two tags
// (e.g. trial index, instance index). Pure function of its arguments, so any
// worker can recreate the stream regardless of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
  std::uint64_t s = base;
  s = splitmix64(s) ^ (0x6a09e667f3bcc909ULL + tag_a);
  s = splitmix64(s) ^ (0xbb67ae8584caa73bULL + tag_b);
  return splitmix64(s);
}

// xoshiro256++ with fixed scalar transforms. The algorithm and the draw
// order below are part of the data contract: generated datasets and attacks
// must reproduce bit-identically across platforms, which rules out the
// unspecified std::<distribution> implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution: one u64 draw.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal, Box-Muller cosine branch. Exactly two uniform draws per
  // call, no caching of the sine branch, so the draw count is predictable.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Standard Gumbel via inverse CDF; the uniform is clamped away from {0, 1}
  // so the double log stays finite. One uniform draw per call.
  double gumbel() {
    const double u = std::clamp(uniform01(), 0x1.0p-53, 1.0 - 0x1.0p-53);
    return -std::log(-std::log(u));
  }

  // Uniform integer in [0, n). Modulo reduction; the bias is < n / 2^64 and
  // irrelevant for the n used here, while keeping one draw per call.
  int uniform_index(int n) {
    if (n <= 0) throw ConfigError("uniform_index: n must be positive");
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  Eigen::VectorXd normal_vec(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::VectorXd gumbel_vec(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gumbel();
    return v;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace dflrb
