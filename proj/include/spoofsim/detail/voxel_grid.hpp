// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_DETAIL_VOXEL_GRID_HPP
#define SPOOFSIM_DETAIL_VOXEL_GRID_HPP

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spoofsim/vec3.hpp"

namespace spoofsim::detail {

// Uniform hash grid over 3D points with cell size equal to the query
// radius, so any neighbor within the radius lies in the 27 surrounding
// cells. Indices refer to the vector the grid was built from.
class VoxelGrid {
 public:
  VoxelGrid(const std::vector<Vec3>& points, double cell_size)
      : points_(points), cell_(cell_size) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key_of(points[i])].push_back(i);
    }
  }

  template <typename Fn>
  void for_each_neighbor(const Vec3& q, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    const std::int64_t cx = coord(q.x);
    const std::int64_t cy = coord(q.y);
    const std::int64_t cz = coord(q.z);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (const std::size_t i : it->second) {
            if ((points_[i] - q).squared_norm() <= r2) fn(i);
          }
        }
      }
    }
  }

 private:
  std::int64_t coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }

  static std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
    const auto ux = static_cast<std::uint64_t>(x) & 0x1fffff;
    const auto uy = static_cast<std::uint64_t>(y) & 0x1fffff;
    const auto uz = static_cast<std::uint64_t>(z) & 0x1fffff;
    return (ux << 42) | (uy << 21) | uz;
  }

  std::uint64_t key_of(const Vec3& p) const {
    return pack(coord(p.x), coord(p.y), coord(p.z));
  }

  const std::vector<Vec3>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace spoofsim::detail

#endif  // SPOOFSIM_DETAIL_VOXEL_GRID_HPP
