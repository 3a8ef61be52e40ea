// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// Attack success criteria and point-level accounting. Injection succeeds
// when any detection overlaps the ground-truth box (BEV IoU > 0); removal
// succeeds when no detection overlaps it (all IoU == 0). Point counting
// separates spoofed returns from benign ones by intensity, then matches
// the remaining points against the benign frame.

#ifndef SPOOFSIM_EVALUATION_HPP
#define SPOOFSIM_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "spoofsim/detail/voxel_grid.hpp"
#include "spoofsim/geometry.hpp"
#include "spoofsim/oriented_box.hpp"
#include "spoofsim/pc_io.hpp"

namespace spoofsim {

namespace detail {

inline double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    twice += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  }
  return std::abs(twice) / 2.0;
}

// Sutherland-Hodgman: clips `subject` by the convex polygon `clip`
// (counterclockwise).
inline std::vector<Vec2> clip_polygon(std::vector<Vec2> subject,
                                      const std::vector<Vec2>& clip) {
  auto side = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  };
  auto intersect = [](const Vec2& a, const Vec2& b, const Vec2& p, const Vec2& q) {
    const double a1 = b.y - a.y;
    const double b1 = a.x - b.x;
    const double c1 = a1 * a.x + b1 * a.y;
    const double a2 = q.y - p.y;
    const double b2 = p.x - q.x;
    const double c2 = a2 * p.x + b2 * p.y;
    const double det = a1 * b2 - a2 * b1;
    return Vec2{(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
  };

  for (std::size_t e = 0, m = clip.size(); e < m && !subject.empty(); ++e) {
    const Vec2& ca = clip[e];
    const Vec2& cb = clip[(e + 1) % m];
    std::vector<Vec2> out;
    out.reserve(subject.size() + 4);
    for (std::size_t i = 0, n = subject.size(); i < n; ++i) {
      const Vec2& prev = subject[(i + n - 1) % n];
      const Vec2& cur = subject[i];
      const bool prev_in = side(ca, cb, prev) >= 0.0;
      const bool cur_in = side(ca, cb, cur) >= 0.0;
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(ca, cb, prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(ca, cb, prev, cur));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

inline std::vector<Vec2> box_polygon(const OrientedBox& b) {
  const auto c = b.corners_bev();
  return {c[0], c[1], c[2], c[3]};
}

inline std::tuple<double, double, double, double, double> box_key(const OrientedBox& b) {
  return {b.center.x, b.center.y, b.length, b.width, b.yaw};
}

}  // namespace detail

/// Bird's-eye-view IoU of two yaw-rotated rectangles, via convex polygon
/// clipping. Arguments are canonically ordered first so the result is
/// exactly symmetric.
inline double iou_bev(const OrientedBox& a, const OrientedBox& b) {
  a.validate();
  b.validate();
  const OrientedBox* first = &a;
  const OrientedBox* second = &b;
  if (detail::box_key(b) < detail::box_key(a)) std::swap(first, second);

  const std::vector<Vec2> pa = detail::box_polygon(*first);
  const std::vector<Vec2> pb = detail::box_polygon(*second);
  const double area_a = first->length * first->width;
  const double area_b = second->length * second->width;
  double inter = detail::polygon_area(detail::clip_polygon(pa, pb));
  // Degenerate edge/corner contact collapses to a zero-area polygon; snap
  // rounding residue so the > 0 success criterion stays meaningful.
  if (inter < 1e-12 * std::max(area_a, area_b)) inter = 0.0;
  const double uni = area_a + area_b - inter;
  double iou = uni > 0.0 ? inter / uni : 0.0;
  if (iou < 0.0) iou = 0.0;
  if (iou > 1.0) iou = 1.0;
  return iou;
}

/// True when some detection overlaps the ground truth (IoU > 0).
inline bool injection_success(const std::vector<DetectionRecord>& detections,
                              const OrientedBox& gt) {
  return std::any_of(detections.begin(), detections.end(),
                     [&gt](const DetectionRecord& d) { return iou_bev(d.box, gt) > 0.0; });
}

/// True when no detection overlaps the ground truth (vacuously true when
/// there are no detections).
inline bool removal_success(const std::vector<DetectionRecord>& detections,
                            const OrientedBox& gt) {
  return std::all_of(detections.begin(), detections.end(),
                     [&gt](const DetectionRecord& d) { return iou_bev(d.box, gt) == 0.0; });
}

/// Number of attacked-cloud points whose intensity exceeds the threshold.
/// Attack returns are far brighter than benign reflections, so this counts
/// the injected points. The benign frame is accepted for interface
/// symmetry with count_removed and does not enter the count.
inline std::size_t count_injected(const PointCloud& /*benign*/, const PointCloud& attacked,
                                  double threshold) {
  std::size_t n = 0;
  for (const Point& p : attacked.points) {
    if (p.intensity > threshold) ++n;
  }
  return n;
}

namespace detail {

// Marks each benign point as removed when no surviving (below-threshold)
// attacked point matches it. Uses exact channel matching when both clouds
// are fully channel-indexed, else greedy nearest-neighbor within match_tol.
inline std::vector<bool> removed_flags(const PointCloud& benign, const PointCloud& attacked,
                                       double threshold, double match_tol) {
  std::vector<const Point*> survivors;
  survivors.reserve(attacked.size());
  for (const Point& p : attacked.points) {
    if (p.intensity <= threshold) survivors.push_back(&p);
  }

  std::vector<bool> removed(benign.size(), false);

  const bool benign_indexed = std::all_of(benign.begin(), benign.end(),
                                          [](const Point& p) { return p.channel.has_value(); });
  const bool attacked_indexed = std::all_of(
      survivors.begin(), survivors.end(), [](const Point* p) { return p->channel.has_value(); });

  if (benign_indexed && attacked_indexed && !benign.empty()) {
    std::unordered_map<std::uint64_t, int> slots;
    slots.reserve(survivors.size());
    auto key = [](const Channel& c) {
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.altitude_index)) << 32) |
             static_cast<std::uint32_t>(c.azimuth_index);
    };
    for (const Point* p : survivors) ++slots[key(*p->channel)];
    for (std::size_t i = 0; i < benign.size(); ++i) {
      auto it = slots.find(key(*benign.points[i].channel));
      if (it != slots.end() && it->second > 0) {
        --it->second;
      } else {
        removed[i] = true;
      }
    }
    return removed;
  }

  // Greedy nearest-neighbor, each survivor consumable once.
  std::vector<Vec3> positions;
  positions.reserve(survivors.size());
  for (const Point* p : survivors) positions.push_back(p->position());
  const VoxelGrid grid(positions, match_tol);
  std::vector<bool> consumed(survivors.size(), false);
  for (std::size_t i = 0; i < benign.size(); ++i) {
    const Vec3 q = benign.points[i].position();
    std::size_t best = survivors.size();
    double best_d2 = match_tol * match_tol;
    grid.for_each_neighbor(q, match_tol, [&](std::size_t k) {
      if (consumed[k]) return;
      const double d2 = (positions[k] - q).squared_norm();
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = k;
      }
    });
    if (best < survivors.size()) {
      consumed[best] = true;
    } else {
      removed[i] = true;
    }
  }
  return removed;
}

}  // namespace detail

/// Number of benign points with no matching survivor in the attacked
/// cloud, after discarding attacked points above the intensity threshold
/// (those are spoofed, not surviving benign returns).
inline std::size_t count_removed(const PointCloud& benign, const PointCloud& attacked,
                                 double threshold, double match_tol = 0.01) {
  if (!(match_tol > 0.0)) throw InvalidArgument("count_removed: match_tol must be positive");
  const std::vector<bool> removed = detail::removed_flags(benign, attacked, threshold, match_tol);
  return static_cast<std::size_t>(std::count(removed.begin(), removed.end(), true));
}

/// Removed fraction per azimuth pie of width bin_deg, keyed by bin index.
/// Bins with no benign points are absent.
inline std::map<int, double> removal_percentage_per_azimuth(const PointCloud& benign,
                                                            const PointCloud& attacked,
                                                            double bin_deg, double threshold,
                                                            double match_tol = 0.01) {
  if (!(bin_deg > 0.0)) throw InvalidArgument("removal_percentage_per_azimuth: bad bin width");
  if (!(match_tol > 0.0)) {
    throw InvalidArgument("removal_percentage_per_azimuth: match_tol must be positive");
  }
  const std::vector<bool> removed = detail::removed_flags(benign, attacked, threshold, match_tol);
  std::map<int, std::pair<std::size_t, std::size_t>> bins;  // bin -> (removed, total)
  for (std::size_t i = 0; i < benign.size(); ++i) {
    const Point& p = benign.points[i];
    const int j = azimuth_bin(azimuth_deg_of(p.x, p.y), bin_deg);
    auto& [r, n] = bins[j];
    if (removed[i]) ++r;
    ++n;
  }
  std::map<int, double> out;
  for (const auto& [j, rn] : bins) {
    out[j] = static_cast<double>(rn.first) / static_cast<double>(rn.second);
  }
  return out;
}

/// Per-trial and aggregate success accounting.
struct EvalReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::vector<bool> per_trial;
};

inline EvalReport success_rate(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) throw InvalidArgument("success_rate: no outcomes");
  EvalReport r;
  r.trials = outcomes.size();
  r.successes = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), true));
  r.success_rate = static_cast<double>(r.successes) / static_cast<double>(r.trials);
  r.per_trial = outcomes;
  return r;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_EVALUATION_HPP
