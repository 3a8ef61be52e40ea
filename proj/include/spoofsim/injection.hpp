// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// Chosen-pattern point injection. Each spoofed point can only move along
// its laser ray, so the attack places pattern point x at
//
//   x + (delta_rand + delta_inner + delta_inter) * g(x),   g(x) = x / ||x||
//
// where delta_rand models the victim's firing-timing randomization,
// delta_inner the per-point placement error within a frame, and
// delta_inter a whole-frame drift drawn once per application. Pulse
// fingerprinting is modeled as random downsampling of the pattern to the
// n points whose fingerprint the attacker happens to match.

#ifndef SPOOFSIM_INJECTION_HPP
#define SPOOFSIM_INJECTION_HPP

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spoofsim/geometry.hpp"
#include "spoofsim/profiles.hpp"
#include "spoofsim/rng.hpp"

namespace spoofsim {

/// Full parameterization of one injection application.
struct InjectionSpec {
  PointCloud pattern;  // the chosen pattern the attacker wants to inject
  std::optional<std::size_t> downsample_n;
  double inner_sigma_m = 0.10;
  double inter_sigma_m = 0.35;
  // Optional per-altitude-ring override of inner_sigma_m, indexed by the
  // point's altitude_index. Rings beyond the table fall back to the scalar.
  std::optional<std::vector<double>> inner_sigma_per_altitude;
  RandModel rand_model;
  double spoofed_intensity = 255.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Child-stream keys under an injection seed.
constexpr std::uint64_t kStreamDownsample = 1;
constexpr std::uint64_t kStreamInterFrame = 2;
constexpr std::uint64_t kStreamPerPoint = 3;

}  // namespace detail

/// Uniformly random n-subset of the pattern, relative order preserved
/// (selection sampling).
inline PointCloud downsample_pattern(const PointCloud& pattern, std::size_t n, SplitRng& rng) {
  if (n > pattern.size()) {
    throw InvalidArgument("downsample_pattern: n exceeds pattern size");
  }
  PointCloud out;
  out.frame_id = pattern.frame_id;
  out.azimuth_bin_resolution_deg = pattern.azimuth_bin_resolution_deg;
  out.points.reserve(n);
  std::size_t remaining = pattern.size();
  std::size_t needed = n;
  for (const Point& p : pattern.points) {
    if (needed == 0) break;
    if (rng.next_double() * static_cast<double>(remaining) < static_cast<double>(needed)) {
      out.points.push_back(p);
      --needed;
    }
    --remaining;
  }
  return out;
}

/// Core displacement: moves every point along its ray by
/// rand_fn(i) + inner_fn(i) + inter, where i is the point's index in
/// `pattern`. Points pushed to non-positive range are dropped; survivors
/// carry `intensity`.
template <typename RandFn, typename InnerFn>
PointCloud displace_along_rays(const PointCloud& pattern, RandFn&& rand_fn, InnerFn&& inner_fn,
                               double inter, double intensity) {
  PointCloud out;
  out.frame_id = pattern.frame_id;
  out.azimuth_bin_resolution_deg = pattern.azimuth_bin_resolution_deg;
  out.points.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Point& p = pattern.points[i];
    const Vec3 dir = ray_direction(p);  // throws DegenerateRay on zero norm
    const double delta = rand_fn(i) + inner_fn(i) + inter;
    if (p.range() + delta <= 0.0) continue;  // pushed past the sensor; no return
    Point q = p;
    const Vec3 pos = p.position() + dir * delta;  // exact identity when delta is 0
    q.x = pos.x;
    q.y = pos.y;
    q.z = pos.z;
    q.intensity = intensity;
    out.points.push_back(std::move(q));
  }
  return out;
}

/// Applies the injection capability model to the spec's pattern.
/// delta_rand and delta_inner are drawn per point from independent child
/// streams keyed by point index; delta_inter is drawn once per call.
inline PointCloud apply_injection(const InjectionSpec& spec) {
  if (spec.inner_sigma_m < 0.0 || spec.inter_sigma_m < 0.0) {
    throw InvalidArgument("apply_injection: sigmas must be >= 0");
  }
  if (spec.spoofed_intensity < 0.0 || spec.spoofed_intensity > 255.0) {
    throw InvalidArgument("apply_injection: spoofed intensity out of [0, 255]");
  }
  SplitRng root(spec.seed);

  PointCloud pattern = spec.pattern;
  if (spec.downsample_n) {
    SplitRng ds = root.child(detail::kStreamDownsample);
    pattern = downsample_pattern(pattern, *spec.downsample_n, ds);
  }

  const double inter = root.child(detail::kStreamInterFrame).gaussian(0.0, spec.inter_sigma_m);
  const SplitRng per_point = root.child(detail::kStreamPerPoint);

  auto inner_sigma_for = [&spec](const Point& p) {
    if (spec.inner_sigma_per_altitude && p.channel) {
      const auto& table = *spec.inner_sigma_per_altitude;
      const auto i = static_cast<std::size_t>(p.channel->altitude_index);
      if (i < table.size()) return table[i];
    }
    return spec.inner_sigma_m;
  };

  // One draw stream per point; rand is drawn before inner within it.
  std::vector<double> rand_draws(pattern.size());
  std::vector<double> inner_draws(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    SplitRng s = per_point.child(i);
    rand_draws[i] = sample_delta_rand(spec.rand_model, s);
    inner_draws[i] = s.gaussian(0.0, inner_sigma_for(pattern.points[i]));
  }

  return displace_along_rays(
      pattern, [&](std::size_t i) { return rand_draws[i]; },
      [&](std::size_t i) { return inner_draws[i]; }, inter, spec.spoofed_intensity);
}

/// Comparison error model that perturbs Cartesian coordinates instead of
/// ray ranges: independent Gaussian offsets along the vehicle's forward,
/// left and up axes.
struct FrustumErrorModel {
  Vec3 forward{1.0, 0.0, 0.0};
  Vec3 left{0.0, 1.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};
  double forward_mean = 1.0, forward_sigma = 0.1;
  double left_mean = 0.0, left_sigma = 0.5;
  double up_mean = 1.0, up_sigma = 0.2;
};

inline PointCloud apply_frustum_error(const PointCloud& pattern, SplitRng& rng,
                                      const FrustumErrorModel& model = {}) {
  PointCloud out;
  out.frame_id = pattern.frame_id;
  out.points.reserve(pattern.size());
  for (const Point& p : pattern.points) {
    const double df = rng.gaussian(model.forward_mean, model.forward_sigma);
    const double dl = rng.gaussian(model.left_mean, model.left_sigma);
    const double du = rng.gaussian(model.up_mean, model.up_sigma);
    const Vec3 pos = p.position() + model.forward * df + model.left * dl + model.up * du;
    Point q = p;
    q.x = pos.x;
    q.y = pos.y;
    q.z = pos.z;
    out.points.push_back(std::move(q));
  }
  return out;
}

enum class MergePolicy {
  Replace,  // attack laser overrides legitimate returns in its azimuth bins
  Append,   // plain union
};

/// Composes spoofed points with a background frame. Under Replace, scene
/// points sharing an azimuth bin with any spoofed point are removed before
/// the union; surviving scene points keep their order, spoofed points
/// follow in order.
inline PointCloud merge_into_scene(const PointCloud& scene, const PointCloud& spoofed,
                                   MergePolicy policy, double bin_resolution_deg = 0.1) {
  PointCloud out;
  out.frame_id = scene.frame_id;
  if (policy == MergePolicy::Replace && !spoofed.empty()) {
    std::unordered_set<int> occupied;
    for (const Point& p : spoofed.points) {
      occupied.insert(azimuth_bin(azimuth_deg_of(p.x, p.y), bin_resolution_deg));
    }
    for (const Point& p : scene.points) {
      if (!occupied.contains(azimuth_bin(azimuth_deg_of(p.x, p.y), bin_resolution_deg))) {
        out.points.push_back(p);
      }
    }
  } else {
    out.points = scene.points;
  }
  out.points.insert(out.points.end(), spoofed.points.begin(), spoofed.points.end());
  return out;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_INJECTION_HPP
