// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_ORIENTED_BOX_HPP
#define SPOOFSIM_ORIENTED_BOX_HPP

#include <array>
#include <cmath>

#include "spoofsim/errors.hpp"
#include "spoofsim/vec3.hpp"

namespace spoofsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Yaw-rotated 3D box: center, (length, width, height) extents, yaw about
/// +z. Length runs along the yaw direction.
struct OrientedBox {
  Vec3 center;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double yaw = 0.0;  // radians

  void validate() const {
    if (!(length > 0.0 && width > 0.0 && height > 0.0)) {
      throw ValidationError("OrientedBox: dims must be strictly positive");
    }
  }

  /// Ground-plane footprint corners, counterclockwise.
  std::array<Vec2, 4> corners_bev() const {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    auto corner = [&](double l, double w) {
      return Vec2{center.x + l * c - w * s, center.y + l * s + w * c};
    };
    return {corner(hl, hw), corner(-hl, hw), corner(-hl, -hw), corner(hl, -hw)};
  }

  double z_min() const { return center.z - height / 2.0; }
  double z_max() const { return center.z + height / 2.0; }

  /// True when (x, y) lies inside the footprint (boundary inclusive).
  bool contains_bev(double x, double y) const {
    const double dx = x - center.x;
    const double dy = y - center.y;
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    const double lx = dx * c + dy * s;
    const double ly = -dx * s + dy * c;
    return std::abs(lx) <= length / 2.0 && std::abs(ly) <= width / 2.0;
  }

  bool contains(const Vec3& p, double slack = 0.0) const {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    const double lx = dx * c + dy * s;
    const double ly = -dx * s + dy * c;
    return std::abs(lx) <= length / 2.0 + slack && std::abs(ly) <= width / 2.0 + slack &&
           std::abs(p.z - center.z) <= height / 2.0 + slack;
  }
};

}  // namespace spoofsim

#endif  // SPOOFSIM_ORIENTED_BOX_HPP
