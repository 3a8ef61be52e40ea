// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// Point removal capability. Each point in the attacked azimuth span is hit
// with per-azimuth probability p_j; a hit point is displaced to xi * g(x)
// along its ray. PRA (synchronized) pulls points to the origin (xi = 0);
// HFR (asynchronized high-frequency pulses) lands them at a random range
// xi ~ U(0, c / (2 f)) capped by the attack pulse interval. The LiDAR then
// discards any return closer than its minimum operational threshold or
// beyond its maximum range, which is what actually removes points.

#ifndef SPOOFSIM_REMOVAL_HPP
#define SPOOFSIM_REMOVAL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spoofsim/geometry.hpp"
#include "spoofsim/pc_io.hpp"
#include "spoofsim/profiles.hpp"
#include "spoofsim/rng.hpp"

namespace spoofsim {

/// Azimuth interval in degrees. lo may exceed hi numerically only via the
/// +-360 fold (e.g. a front-facing span is naturally [-15, 15]).
struct AzimuthSpan {
  double lo_deg = 0.0;
  double hi_deg = 0.0;

  double width() const { return hi_deg - lo_deg; }
  double center() const { return (lo_deg + hi_deg) / 2.0; }

  void validate() const {
    if (!(hi_deg > lo_deg)) throw InvalidArgument("AzimuthSpan: hi must exceed lo");
    if (hi_deg - lo_deg > 360.0) throw InvalidArgument("AzimuthSpan: width exceeds 360");
  }

  /// Folds an azimuth in [0, 360) into the span's window by +-360.
  double fold(double azimuth_deg) const {
    double q = azimuth_deg;
    if (q > hi_deg) q -= 360.0;
    if (q < lo_deg) q += 360.0;
    return q;
  }

  bool contains(double azimuth_deg) const {
    const double q = fold(azimuth_deg);
    return q >= lo_deg && q <= hi_deg;
  }
};

struct RemovalSpec {
  enum class Kind { PRA, HFR };

  Kind kind = Kind::HFR;
  double frequency_hz = 1.0e6;  // HFR attack pulse frequency
  AzimuthProbTable prob_profile;
  AzimuthSpan attack_span;
  std::uint64_t seed = 0;
  // What-if override: lets PRA run against LiDARs whose randomization or
  // fingerprinting would defeat the required synchronization.
  bool allow_inapplicable = false;
};

struct RemovalOutcome {
  PointCloud surviving;
  std::size_t removed_count = 0;  // points filtered out by MOT / max range
  std::size_t hit_count = 0;      // points that lost their legitimate return
  std::size_t noise_count = 0;    // hit points that survived at a displaced range
};

/// Maximum HFR displacement: the farthest apparent range one attack pulse
/// interval allows, c / (2 f).
inline double xi_max(double frequency_hz) {
  if (!(frequency_hz > 0.0)) throw InvalidArgument("xi_max: frequency must be positive");
  return kSpeedOfLight / (2.0 * frequency_hz);
}

/// Expected hit-count ceiling when spoofing a pulse-fingerprinting LiDAR:
/// random pulses only coincide with the fingerprint by chance.
constexpr double kFingerprintHitCeiling = 113.0;

namespace detail {

constexpr std::uint64_t kStreamRemovalPoint = 11;

}  // namespace detail

/// Applies the removal capability model. The cloud must have azimuth bins
/// assigned; p_j is evaluated at each bin's center azimuth. Points whose
/// bin center lies outside the attack span are never modified. Hit points
/// that survive the MOT / max-range filter are retagged with intensity 255
/// (they are attack-induced returns).
inline RemovalOutcome apply_removal(const PointCloud& cloud, const RemovalSpec& spec,
                                    const LidarProfile& profile) {
  spec.attack_span.validate();
  if (spec.kind == RemovalSpec::Kind::PRA && !spec.allow_inapplicable) {
    if (profile.rand_model.kind != RandModel::Kind::None) {
      throw ApplicabilityError("PRA is not applicable to " + profile.name +
                               ": timing randomization defeats synchronization");
    }
    if (profile.fingerprint) {
      throw ApplicabilityError("PRA is not applicable to " + profile.name +
                               ": pulse fingerprinting defeats synchronization");
    }
  }
  if (!cloud.azimuth_bin_resolution_deg) {
    throw PreconditionError("apply_removal: cloud has no azimuth bins assigned");
  }
  const double res = *cloud.azimuth_bin_resolution_deg;

  auto bin_center = [res](int j) { return (static_cast<double>(j) + 0.5) * res; };

  // Per-bin hit probability, zero outside the attack span.
  auto probability_for = [&](int j) {
    const double az = bin_center(j);
    if (!spec.attack_span.contains(az)) return 0.0;
    return spec.prob_profile.at(spec.attack_span.fold(az));
  };

  // Fingerprinting only lets pulses coincide by chance: scale p_j so the
  // expected hit count stays at the observed ceiling.
  double scale = 1.0;
  if (spec.kind == RemovalSpec::Kind::HFR && profile.fingerprint) {
    std::map<int, std::size_t> bin_counts;
    for (const Point& p : cloud.points) {
      if (!p.channel) throw PreconditionError("apply_removal: point missing azimuth bin");
      ++bin_counts[p.channel->azimuth_index];
    }
    double expected_hits = 0.0;
    for (const auto& [j, n] : bin_counts) {
      expected_hits += probability_for(j) * static_cast<double>(n);
    }
    if (expected_hits > kFingerprintHitCeiling) {
      scale = kFingerprintHitCeiling / expected_hits;
    }
  }

  const double xi_cap = spec.kind == RemovalSpec::Kind::HFR ? xi_max(spec.frequency_hz) : 0.0;

  RemovalOutcome outcome;
  outcome.surviving.frame_id = cloud.frame_id;
  outcome.surviving.azimuth_bin_resolution_deg = cloud.azimuth_bin_resolution_deg;
  outcome.surviving.points.reserve(cloud.size());

  const SplitRng per_point = SplitRng(spec.seed).child(detail::kStreamRemovalPoint);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    if (!p.channel) throw PreconditionError("apply_removal: point missing azimuth bin");
    const double prob = probability_for(p.channel->azimuth_index) * scale;
    if (prob <= 0.0) {
      outcome.surviving.points.push_back(p);
      continue;
    }
    SplitRng s = per_point.child(i);
    if (!s.bernoulli(prob)) {
      outcome.surviving.points.push_back(p);
      continue;
    }
    ++outcome.hit_count;
    const double xi =
        spec.kind == RemovalSpec::Kind::PRA ? 0.0 : s.uniform(0.0, xi_cap);
    if (xi < profile.mot_m || xi > profile.max_range_m) {
      ++outcome.removed_count;
      continue;
    }
    // Displaced return survives the filter; it sits on the original ray.
    Point q = p;
    if (xi == 0.0) {
      q.x = q.y = q.z = 0.0;
    } else {
      const Vec3 pos = ray_direction(p) * xi;  // throws DegenerateRay on zero norm
      q.x = pos.x;
      q.y = pos.y;
      q.z = pos.z;
    }
    q.intensity = 255.0;
    ++outcome.noise_count;
    outcome.surviving.points.push_back(std::move(q));
  }
  return outcome;
}

/// Symmetric plateau shape for p_j: p_center across the central plateau,
/// linear falloff to zero over falloff_deg on each side.
struct PlateauShape {
  double p_center = 0.97;
  double plateau_deg = 0.0;
  double falloff_deg = 0.0;
};

/// Default plateau over a span: near-certain removal across the central
/// 60% with linear falloff over the remaining 20% per side.
inline PlateauShape default_plateau(const AzimuthSpan& span) {
  return {0.97, 0.6 * span.width(), 0.2 * span.width()};
}

/// Builds a per-azimuth probability table for the span from a plateau
/// shape. Rows are knots of the piecewise-linear curve in the span's
/// coordinate window.
inline AzimuthProbTable build_removal_profile(const PlateauShape& shape,
                                              const AzimuthSpan& span) {
  span.validate();
  if (!(shape.p_center >= 0.0 && shape.p_center <= 1.0)) {
    throw InvalidArgument("build_removal_profile: p_center out of [0, 1]");
  }
  if (shape.plateau_deg < 0.0 || shape.falloff_deg < 0.0) {
    throw InvalidArgument("build_removal_profile: negative width");
  }
  const double w = span.width();
  if (shape.plateau_deg + 2.0 * shape.falloff_deg > w * (1.0 + 1e-12)) {
    throw InvalidArgument("build_removal_profile: plateau + falloffs exceed span");
  }

  // Plateau covering the whole span: constant p_center table.
  if (shape.plateau_deg >= w) {
    return AzimuthProbTable({{span.lo_deg, shape.p_center}, {span.hi_deg, shape.p_center}});
  }

  const double center = span.center();
  const double p_lo = center - shape.plateau_deg / 2.0;
  const double p_hi = center + shape.plateau_deg / 2.0;
  // A zero-width falloff is an abrupt edge; knots a hair apart keep the
  // table's azimuths strictly increasing.
  const double fall = std::max(shape.falloff_deg, 1e-9);

  std::vector<std::pair<double, double>> knots;
  auto push = [&knots](double az, double p) {
    if (!knots.empty() && az <= knots.back().first) return;
    knots.emplace_back(az, p);
  };
  push(span.lo_deg, 0.0);
  push(p_lo - fall, 0.0);
  push(p_lo, shape.p_center);
  push(p_hi, shape.p_center);
  push(std::min(p_hi + fall, span.hi_deg), 0.0);
  push(span.hi_deg, 0.0);
  return AzimuthProbTable(std::move(knots));
}

/// FromTable pass-through, validated.
inline AzimuthProbTable build_removal_profile(const AzimuthProbTable& table) { return table; }

}  // namespace spoofsim

#endif  // SPOOFSIM_REMOVAL_HPP
