// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_RNG_HPP
#define SPOOFSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace spoofsim {

namespace detail {

// SplitMix64 finalizer. Bijective, good avalanche; used both to advance the
// stream and to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Splittable deterministic pseudo-random generator (SplitMix64).
///
/// Every consumer derives its own stream with child(key); streams are
/// reproducible regardless of the order in which sibling streams are
/// consumed, so per-point draws do not depend on iteration order.
/// All sampling is implemented here (no std:: distributions) so identical
/// seeds give identical values on every platform.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(detail::mix64(seed + detail::kGamma)) {}

  /// Independent child stream identified by `key` at the current seed.
  SplitRng child(std::uint64_t key) const {
    SplitRng c(0);
    c.state_ = detail::mix64(state_ ^ detail::mix64(key * 0xa0761d6478bd642fULL + detail::kGamma));
    return c;
  }

  std::uint64_t next_u64() {
    state_ += detail::kGamma;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1), 53 bits of randomness.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Bernoulli trial with success probability p.
  bool bernoulli(double p) { return next_double() < p; }

  /// Gaussian via Box-Muller; consumes exactly two raw draws per call.
  double gaussian(double mean, double stddev) {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * (r * std::cos(two_pi * u2));
  }

  /// Uniform integer in [0, n). Rejection-free multiply-shift; the modulo
  /// bias is < 2^-53 for the n used here.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace spoofsim

#endif  // SPOOFSIM_RNG_HPP
