// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_GEOMETRY_HPP
#define SPOOFSIM_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spoofsim/errors.hpp"
#include "spoofsim/vec3.hpp"

namespace spoofsim {

constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Laser channel of a point: i-th altitude ring, j-th azimuth column.
struct Channel {
  std::int32_t altitude_index = 0;
  std::int32_t azimuth_index = 0;

  bool operator==(const Channel&) const = default;
};

/// One LiDAR return. Sensor-centered Cartesian coordinates in meters,
/// intensity on the 0-255 scale.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  std::optional<Channel> channel;

  Point() = default;
  Point(double x_, double y_, double z_, double intensity_ = 0.0)
      : x(x_), y(y_), z(z_), intensity(intensity_) {}

  Vec3 position() const { return {x, y, z}; }
  double range() const { return position().norm(); }
};

/// An ordered frame of points. Operations never reorder surviving points.
struct PointCloud {
  std::vector<Point> points;
  std::uint32_t frame_id = 0;

  // Set by readers when stored intensities in [0,1] were rescaled to [0,255].
  bool intensity_rescaled = false;

  // Present once assign_azimuth_bins has run; records the bin width used.
  std::optional<double> azimuth_bin_resolution_deg;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
  auto begin() { return points.begin(); }
  auto end() { return points.end(); }
};

/// Range / azimuth / altitude triple. Azimuth in degrees, counterclockwise
/// from +x toward +y in [0, 360); altitude in degrees from the xy-plane in
/// [-90, 90]. The origin maps to (0, 0, 0) by convention.
struct SphericalCoord {
  double range = 0.0;
  double azimuth_deg = 0.0;
  double altitude_deg = 0.0;
};

/// Unit direction a laser return can move along: g(x) = x / ||x||.
inline Vec3 ray_direction(const Point& p) {
  const Vec3 v = p.position();
  const double n = v.norm();
  if (!(n > 0.0)) {
    throw DegenerateRay("ray_direction: zero-norm point has no ray");
  }
  return v / n;
}

/// Azimuth of (x, y) in degrees, wrapped into [0, 360).
inline double azimuth_deg_of(double x, double y) {
  double az = rad_to_deg(std::atan2(y, x));
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az = 0.0;  // guards atan2(-0., ...) rounding
  return az;
}

inline SphericalCoord to_spherical(const Point& p) {
  const double r = p.range();
  if (r == 0.0) return {0.0, 0.0, 0.0};
  double s = p.z / r;
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return {r, azimuth_deg_of(p.x, p.y), rad_to_deg(std::asin(s))};
}

inline Point from_spherical(const SphericalCoord& s) {
  const double az = deg_to_rad(s.azimuth_deg);
  const double alt = deg_to_rad(s.altitude_deg);
  const double c = std::cos(alt);
  return {s.range * c * std::cos(az), s.range * c * std::sin(az), s.range * std::sin(alt)};
}

/// Number of azimuth bins a full turn splits into at `resolution_deg`.
inline int azimuth_bin_count(double resolution_deg) {
  return static_cast<int>(std::ceil(360.0 / resolution_deg));
}

/// Bin index of an azimuth angle: floor(azimuth / resolution), clamped into
/// [0, ceil(360/resolution)) so the mapping is total on [0, 360).
inline int azimuth_bin(double azimuth_deg, double resolution_deg) {
  if (!(resolution_deg > 0.0)) {
    throw InvalidResolution("azimuth_bin: resolution must be positive");
  }
  int idx = static_cast<int>(std::floor(azimuth_deg / resolution_deg));
  const int n = azimuth_bin_count(resolution_deg);
  if (idx < 0) idx = 0;
  if (idx >= n) idx = n - 1;
  return idx;
}

/// Assigns every point's azimuth_index from its azimuth angle. Altitude
/// indices already present are preserved. Default bin width 0.1 degrees.
inline PointCloud assign_azimuth_bins(PointCloud cloud, double resolution_deg = 0.1) {
  if (!(resolution_deg > 0.0)) {
    throw InvalidResolution("assign_azimuth_bins: resolution must be positive");
  }
  for (Point& p : cloud.points) {
    const int j = azimuth_bin(azimuth_deg_of(p.x, p.y), resolution_deg);
    if (p.channel) {
      p.channel->azimuth_index = j;
    } else {
      p.channel = Channel{0, j};
    }
  }
  cloud.azimuth_bin_resolution_deg = resolution_deg;
  return cloud;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_GEOMETRY_HPP
