// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation scenarios: a target vehicle is placed ahead of the victim
// sensor and existing background rays are re-cast onto its surface, so the
// object appears exactly where the LiDAR would have sampled it. Distance 0
// means the victim's nose touches the object's tail.

#ifndef SPOOFSIM_SCENARIO_HPP
#define SPOOFSIM_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spoofsim/geometry.hpp"
#include "spoofsim/oriented_box.hpp"
#include "spoofsim/rng.hpp"

namespace spoofsim {

struct Pose {
  Vec3 center;
  double yaw = 0.0;  // radians, about +z
};

struct Triangle {
  Vec3 a, b, c;

  double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

struct BoxDims {
  double length = 0.0;  // along the object's yaw axis
  double width = 0.0;
  double height = 0.0;
};

/// Target object: a triangle mesh (vertices in the object frame) or a box
/// primitive, plus a world pose.
struct ObjectModel {
  std::variant<BoxDims, std::vector<Triangle>> shape;
  Pose pose;

  bool is_box() const { return std::holds_alternative<BoxDims>(shape); }
  const BoxDims& box() const { return std::get<BoxDims>(shape); }
  const std::vector<Triangle>& mesh() const { return std::get<std::vector<Triangle>>(shape); }

  void validate() const {
    if (is_box()) {
      const BoxDims& b = box();
      if (!(b.length > 0.0 && b.width > 0.0 && b.height > 0.0)) {
        throw InvalidModel("ObjectModel: box dims must be positive");
      }
    } else {
      if (mesh().empty()) throw InvalidModel("ObjectModel: empty mesh");
      for (const Triangle& t : mesh()) {
        if (!(t.area() > 1e-12)) throw InvalidModel("ObjectModel: degenerate triangle");
      }
    }
  }
};

struct Scenario {
  PointCloud cloud;
  OrientedBox gt_box;
  double distance = 0.0;
  std::size_t object_point_count = 0;  // background points moved onto the object
};

namespace detail {

inline Vec3 rotate_yaw(const Vec3& v, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {v.x * c - v.y * s, v.x * s + v.y * c, v.z};
}

// Moeller-Trumbore for a ray from the sensor origin. Returns the hit
// parameter t > eps, or infinity on a miss.
inline double ray_triangle_hit(const Vec3& dir, const Triangle& tri) {
  constexpr double eps = 1e-12;
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < eps) return std::numeric_limits<double>::infinity();
  const double inv_det = 1.0 / det;
  const Vec3 tvec = -tri.a;  // ray origin minus vertex a
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::numeric_limits<double>::infinity();
  const double t = e2.dot(qvec) * inv_det;
  return t > 1e-9 ? t : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// First intersection of the origin ray `dir` (unit) with the object, in
/// world coordinates. Infinity when the ray misses.
inline double first_hit_range(const Vec3& dir, const ObjectModel& model) {
  if (model.is_box()) {
    // Transform the ray into the box frame (inverse yaw about the center).
    const Vec3 local_dir = detail::rotate_yaw(dir, -model.pose.yaw);
    const Vec3 local_origin = detail::rotate_yaw(-model.pose.center, -model.pose.yaw);
    // Slab test with a translated origin: substitute p = origin + t*dir.
    const BoxDims& b = model.box();
    const Vec3 half{b.length / 2.0, b.width / 2.0, b.height / 2.0};
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    const double o[3] = {local_origin.x, local_origin.y, local_origin.z};
    const double d[3] = {local_dir.x, local_dir.y, local_dir.z};
    const double h[3] = {half.x, half.y, half.z};
    for (int i = 0; i < 3; ++i) {
      if (std::abs(d[i]) < 1e-300) {
        if (std::abs(o[i]) > h[i]) return std::numeric_limits<double>::infinity();
        continue;
      }
      double t0 = (-h[i] - o[i]) / d[i];
      double t1 = (h[i] - o[i]) / d[i];
      if (t0 > t1) std::swap(t0, t1);
      t_enter = std::max(t_enter, t0);
      t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit || t_exit < 1e-9) return std::numeric_limits<double>::infinity();
    return t_enter > 1e-9 ? t_enter : std::numeric_limits<double>::infinity();
  }

  // Mesh: brute-force first hit over world-space triangles.
  double best = std::numeric_limits<double>::infinity();
  for (const Triangle& t : model.mesh()) {
    const Triangle world{
        detail::rotate_yaw(t.a, model.pose.yaw) + model.pose.center,
        detail::rotate_yaw(t.b, model.pose.yaw) + model.pose.center,
        detail::rotate_yaw(t.c, model.pose.yaw) + model.pose.center,
    };
    best = std::min(best, detail::ray_triangle_hit(dir, world));
  }
  return best;
}

/// World-frame minimum x coordinate of the object (its tail when facing
/// +x): the datum the placement distance is measured to.
inline double object_min_x(const ObjectModel& model) {
  double min_x = std::numeric_limits<double>::infinity();
  if (model.is_box()) {
    const BoxDims& b = model.box();
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        const Vec3 corner = detail::rotate_yaw(
            {sx * b.length / 2.0, sy * b.width / 2.0, 0.0}, model.pose.yaw);
        min_x = std::min(min_x, model.pose.center.x + corner.x);
      }
    }
  } else {
    for (const Triangle& t : model.mesh()) {
      for (const Vec3* v : {&t.a, &t.b, &t.c}) {
        min_x = std::min(min_x, detail::rotate_yaw(*v, model.pose.yaw).x + model.pose.center.x);
      }
    }
  }
  return min_x;
}

/// Oriented bounding box of the object at its pose.
inline OrientedBox object_bounding_box(const ObjectModel& model) {
  OrientedBox box;
  box.yaw = model.pose.yaw;
  if (model.is_box()) {
    const BoxDims& b = model.box();
    box.center = model.pose.center;
    box.length = b.length;
    box.width = b.width;
    box.height = b.height;
    return box;
  }
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  for (const Triangle& t : model.mesh()) {
    for (const Vec3* v : {&t.a, &t.b, &t.c}) {
      lo = {std::min(lo.x, v->x), std::min(lo.y, v->y), std::min(lo.z, v->z)};
      hi = {std::max(hi.x, v->x), std::max(hi.y, v->y), std::max(hi.z, v->z)};
    }
  }
  const Vec3 mid = (lo + hi) / 2.0;
  box.center = detail::rotate_yaw(mid, model.pose.yaw) + model.pose.center;
  box.length = hi.x - lo.x;
  box.width = hi.y - lo.y;
  box.height = hi.z - lo.z;
  return box;
}

/// Places the object so its tail sits `distance` ahead of the victim's
/// nose and re-casts background rays: any point whose ray first hits the
/// object closer than its original range moves to that hit. Returns the
/// modified cloud and the object's ground-truth box.
inline Scenario place_object(const PointCloud& background, const ObjectModel& model,
                             double distance, double nose_offset = 0.0) {
  if (distance < 0.0) throw InvalidArgument("place_object: distance must be >= 0");
  model.validate();

  ObjectModel placed = model;
  const double shift = nose_offset + distance - object_min_x(placed);
  placed.pose.center.x += shift;

  Scenario scenario;
  scenario.distance = distance;
  scenario.gt_box = object_bounding_box(placed);
  scenario.cloud.frame_id = background.frame_id;
  scenario.cloud.azimuth_bin_resolution_deg = background.azimuth_bin_resolution_deg;
  scenario.cloud.points.reserve(background.size());

  for (const Point& p : background.points) {
    const double r = p.range();
    if (r <= 0.0) {
      scenario.cloud.points.push_back(p);  // no ray to re-cast
      continue;
    }
    const Vec3 dir = p.position() / r;
    const double hit = first_hit_range(dir, placed);
    if (hit < r) {
      Point moved = p;
      const Vec3 pos = dir * hit;
      moved.x = pos.x;
      moved.y = pos.y;
      moved.z = pos.z;
      scenario.cloud.points.push_back(std::move(moved));
      ++scenario.object_point_count;
    } else {
      scenario.cloud.points.push_back(p);
    }
  }
  return scenario;
}

/// Scenarios at d = d_min, d_min + step, ..., up to d_max inclusive.
inline std::vector<Scenario> distance_sweep(const PointCloud& background,
                                            const ObjectModel& model, double d_min = 0.0,
                                            double d_max = 14.0, double step = 1.0,
                                            double nose_offset = 0.0) {
  if (!(step > 0.0)) throw InvalidArgument("distance_sweep: step must be positive");
  if (d_max < d_min) throw InvalidArgument("distance_sweep: d_max must be >= d_min");
  const auto count =
      static_cast<std::size_t>(std::floor((d_max - d_min) / step + 1e-9)) + 1;
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(place_object(background, model, d_min + static_cast<double>(i) * step,
                               nose_offset));
  }
  return out;
}

/// Random pose perturbation: independent uniform offsets up to the given
/// maxima longitudinally (x) and laterally (y). Yaw and z are unchanged.
inline ObjectModel jitter_pose(ObjectModel model, double lateral_max, double longitudinal_max,
                               SplitRng& rng) {
  if (lateral_max < 0.0 || longitudinal_max < 0.0) {
    throw InvalidArgument("jitter_pose: maxima must be >= 0");
  }
  const double dx = longitudinal_max > 0.0 ? rng.uniform(-longitudinal_max, longitudinal_max)
                                           : 0.0;
  const double dy = lateral_max > 0.0 ? rng.uniform(-lateral_max, lateral_max) : 0.0;
  model.pose.center.x += dx;
  model.pose.center.y += dy;
  return model;
}

// ---------------------------------------------------------------------------
// Model loading
// ---------------------------------------------------------------------------

/// ASCII STL. Vertices are taken as the object frame; the pose is left at
/// the origin for the caller to set.
inline ObjectModel load_stl_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_stl_ascii: cannot open " + path);
  std::string tok;
  if (!(in >> tok) || tok != "solid") {
    throw FormatError("load_stl_ascii: not an ASCII STL file");
  }
  std::getline(in, tok);  // solid name

  std::vector<Triangle> tris;
  std::string word;
  while (in >> word) {
    if (word == "endsolid") break;
    if (word != "facet") throw FormatError("load_stl_ascii: expected 'facet', got " + word);
    double dummy = 0.0;
    if (!(in >> word >> dummy >> dummy >> dummy) || word != "normal") {
      throw FormatError("load_stl_ascii: malformed facet normal");
    }
    if (!(in >> word) || word != "outer" || !(in >> word) || word != "loop") {
      throw FormatError("load_stl_ascii: expected 'outer loop'");
    }
    Vec3 v[3];
    for (auto& vert : v) {
      if (!(in >> word) || word != "vertex" || !(in >> vert.x >> vert.y >> vert.z)) {
        throw FormatError("load_stl_ascii: malformed vertex");
      }
    }
    if (!(in >> word) || word != "endloop" || !(in >> word) || word != "endfacet") {
      throw FormatError("load_stl_ascii: unterminated facet");
    }
    tris.push_back({v[0], v[1], v[2]});
  }
  ObjectModel model{std::move(tris), Pose{}};
  model.validate();  // throws InvalidModel on degenerate triangles
  return model;
}

/// Declarative box spec:
///   {"box": {"dims": [l, w, h]}, "pose": {"center": [x, y, z], "yaw": r}}
inline ObjectModel load_box_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_box_spec: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    const auto& dims = j.at("box").at("dims");
    ObjectModel model{BoxDims{dims.at(0).get<double>(), dims.at(1).get<double>(),
                              dims.at(2).get<double>()},
                      Pose{}};
    if (j.contains("pose")) {
      const auto& pose = j.at("pose");
      if (pose.contains("center")) {
        const auto& c = pose.at("center");
        model.pose.center = {c.at(0).get<double>(), c.at(1).get<double>(),
                             c.at(2).get<double>()};
      }
      model.pose.yaw = pose.value("yaw", 0.0);
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("load_box_spec: ") + e.what());
  }
}

/// Dispatches on extension: .stl -> ASCII STL, .json -> box spec.
inline ObjectModel load_object_model(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".stl") return load_stl_ascii(path);
  if (ext == ".json") return load_box_spec(path);
  throw FormatError("load_object_model: unsupported extension '" + ext + "'");
}

// ---------------------------------------------------------------------------
// Synthetic background
// ---------------------------------------------------------------------------

struct SyntheticBackgroundConfig {
  double wall_distance_m = 30.0;  // vertical wall plane at x = wall_distance
  double azimuth_min_deg = -40.0;
  double azimuth_max_deg = 40.0;
  double azimuth_step_deg = 0.2;
  double altitude_min_deg = -12.0;
  double altitude_max_deg = 12.0;
  double altitude_step_deg = 0.4;
  double intensity = 40.0;  // typical benign wall reflection
};

/// Uniform angular grid of rays cast onto a wall plane ahead of the
/// sensor. Self-contained stand-in for a real background frame.
inline PointCloud synthetic_background(const SyntheticBackgroundConfig& cfg = {}) {
  if (!(cfg.wall_distance_m > 0.0)) {
    throw InvalidArgument("synthetic_background: wall distance must be positive");
  }
  PointCloud cloud;
  for (double alt = cfg.altitude_min_deg; alt <= cfg.altitude_max_deg + 1e-9;
       alt += cfg.altitude_step_deg) {
    for (double az = cfg.azimuth_min_deg; az <= cfg.azimuth_max_deg + 1e-9;
         az += cfg.azimuth_step_deg) {
      const double ca = std::cos(deg_to_rad(alt));
      const Vec3 dir{ca * std::cos(deg_to_rad(az)), ca * std::sin(deg_to_rad(az)),
                     std::sin(deg_to_rad(alt))};
      if (dir.x <= 1e-6) continue;  // ray never reaches the wall
      const double t = cfg.wall_distance_m / dir.x;
      Point p;
      const Vec3 pos = dir * t;
      p.x = pos.x;
      p.y = pos.y;
      p.z = pos.z;
      p.intensity = cfg.intensity;
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_SCENARIO_HPP
