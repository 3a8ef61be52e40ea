// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// A deliberately simple geometric detector: single-linkage Euclidean
// clustering above a ground plane, followed by PCA box fitting. It exists
// so the full attack/evaluation pipeline runs without an external DNN
// detector; it makes no attempt to match any learned model's behavior.

#ifndef SPOOFSIM_DETECTOR_HPP
#define SPOOFSIM_DETECTOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "spoofsim/detail/voxel_grid.hpp"
#include "spoofsim/errors.hpp"
#include "spoofsim/geometry.hpp"
#include "spoofsim/oriented_box.hpp"
#include "spoofsim/pc_io.hpp"

namespace spoofsim {

struct DetectorParams {
  double cluster_radius_m = 0.5;
  std::size_t min_points = 10;
  std::optional<std::size_t> max_points;
  double ground_z_m = -1.4;  // points at or below are ignored
};

/// Single-linkage Euclidean clusters over points above the ground plane.
/// Returns disjoint index sets covering every point of each kept cluster;
/// clusters outside [min_points, max_points] are dropped. Cluster order is
/// by smallest member index, members ascending.
inline std::vector<std::vector<std::size_t>> cluster(const PointCloud& cloud,
                                                     const DetectorParams& params = {}) {
  if (!(params.cluster_radius_m > 0.0)) {
    throw InvalidArgument("cluster: radius must be positive");
  }
  if (params.min_points < 1) throw InvalidArgument("cluster: min_points must be >= 1");

  std::vector<std::size_t> kept;  // indices into cloud
  std::vector<Vec3> positions;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.points[i].z > params.ground_z_m) {
      kept.push_back(i);
      positions.push_back(cloud.points[i].position());
    }
  }

  const detail::VoxelGrid grid(positions, params.cluster_radius_m);
  std::vector<std::int64_t> label(positions.size(), -1);
  std::vector<std::vector<std::size_t>> clusters;

  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < positions.size(); ++seed) {
    if (label[seed] >= 0) continue;
    const auto id = static_cast<std::int64_t>(clusters.size());
    std::vector<std::size_t> members;
    label[seed] = id;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      members.push_back(kept[cur]);
      grid.for_each_neighbor(positions[cur], params.cluster_radius_m, [&](std::size_t nb) {
        if (label[nb] < 0) {
          label[nb] = id;
          stack.push_back(nb);
        }
      });
    }
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
  }

  std::vector<std::vector<std::size_t>> out;
  for (auto& c : clusters) {
    if (c.size() < params.min_points) continue;
    if (params.max_points && c.size() > *params.max_points) continue;
    out.push_back(std::move(c));
  }
  return out;
}

/// Fits an oriented box: yaw from the principal axis of the ground-plane
/// covariance, extents from the rotated frame, dims clamped to 0.1 m.
inline OrientedBox fit_box(const std::vector<Point>& points) {
  if (points.empty()) throw InvalidArgument("fit_box: empty point set");

  double mx = 0.0, my = 0.0;
  for (const Point& p : points) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point& p : points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double yaw = 0.5 * std::atan2(2.0 * sxy, sxx - syy);

  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
  double wmin = lmin, wmax = -lmin;
  double zmin = lmin, zmax = -lmin;
  for (const Point& p : points) {
    const double lx = p.x * c + p.y * s;
    const double ly = -p.x * s + p.y * c;
    lmin = std::min(lmin, lx);
    lmax = std::max(lmax, lx);
    wmin = std::min(wmin, ly);
    wmax = std::max(wmax, ly);
    zmin = std::min(zmin, p.z);
    zmax = std::max(zmax, p.z);
  }

  OrientedBox box;
  box.yaw = yaw;
  box.length = std::max(lmax - lmin, 0.1);
  box.width = std::max(wmax - wmin, 0.1);
  box.height = std::max(zmax - zmin, 0.1);
  const double cl = (lmin + lmax) / 2.0;
  const double cw = (wmin + wmax) / 2.0;
  box.center = {cl * c - cw * s, cl * s + cw * c, (zmin + zmax) / 2.0};
  return box;
}

/// Full pipeline: cluster, fit, score by cluster size (100 points -> 1.0).
inline std::vector<DetectionRecord> detect(const PointCloud& cloud,
                                           const DetectorParams& params = {}) {
  std::vector<DetectionRecord> out;
  for (const auto& members : cluster(cloud, params)) {
    std::vector<Point> pts;
    pts.reserve(members.size());
    for (const std::size_t i : members) pts.push_back(cloud.points[i]);
    DetectionRecord rec;
    rec.box = fit_box(pts);
    rec.score = std::min(1.0, static_cast<double>(members.size()) / 100.0);
    rec.label = "object";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_DETECTOR_HPP
