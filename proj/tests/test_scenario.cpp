// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "spoofsim/scenario.hpp"

using namespace spoofsim;
namespace fs = std::filesystem;

namespace {

ObjectModel axis_box(double l = 4.0, double w = 2.0, double h = 1.6, double yaw = 0.0) {
  ObjectModel model{BoxDims{l, w, h}, Pose{}};
  model.pose.yaw = yaw;
  return model;
}

// Background with rays centered on the +x axis so the box occludes a
// nested direction cone at every distance.
PointCloud centered_background() {
  SyntheticBackgroundConfig cfg;
  cfg.wall_distance_m = 40.0;
  cfg.azimuth_min_deg = -30.0;
  cfg.azimuth_max_deg = 30.0;
  cfg.azimuth_step_deg = 0.25;
  cfg.altitude_min_deg = -10.0;
  cfg.altitude_max_deg = 10.0;
  cfg.altitude_step_deg = 0.5;
  return synthetic_background(cfg);
}

}  // namespace

TEST_CASE("object behind every surface leaves the cloud unchanged") {
  const PointCloud background = centered_background();
  const Scenario sc = place_object(background, axis_box(), 60.0);  // behind the 40 m wall
  CHECK(sc.object_point_count == 0);
  REQUIRE(sc.cloud.size() == background.size());
  for (std::size_t i = 0; i < background.size(); ++i) {
    CHECK(sc.cloud.points[i].x == background.points[i].x);
  }
}

TEST_CASE("single ray moves to the analytic box-face hit") {
  PointCloud background;
  background.points.push_back(Point{50.0, 0.0, 0.0, 10.0});  // straight ahead at 50 m
  // Box tail at x = 10, so the +x ray hits the rear face plane exactly there.
  const Scenario sc = place_object(background, axis_box(), 10.0);
  REQUIRE(sc.object_point_count == 1);
  CHECK(sc.cloud.points[0].x == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(sc.cloud.points[0].y == 0.0);
  CHECK(sc.cloud.points[0].z == 0.0);
}

TEST_CASE("moved points lie on the object surface and on their rays") {
  const PointCloud background = centered_background();
  const ObjectModel model = axis_box();
  const Scenario sc = place_object(background, model, 6.0);
  REQUIRE(sc.object_point_count > 0);
  for (std::size_t i = 0; i < background.size(); ++i) {
    const Point& orig = background.points[i];
    const Point& cur = sc.cloud.points[i];
    const bool moved = cur.x != orig.x || cur.y != orig.y || cur.z != orig.z;
    if (!moved) continue;
    // On the original ray.
    const Vec3 g = orig.position() / orig.range();
    CHECK(cur.position().cross(g).norm() < 1e-9 * cur.range());
    // Range never increases.
    CHECK(cur.range() <= orig.range() + 1e-12);
    // Inside the ground-truth box, and on its boundary.
    CHECK(sc.gt_box.contains(cur.position(), 1e-6));
    const double dx = std::abs(std::abs(cur.x - sc.gt_box.center.x) - 2.0);
    const double dy = std::abs(std::abs(cur.y - sc.gt_box.center.y) - 1.0);
    const double dz = std::abs(std::abs(cur.z - sc.gt_box.center.z) - 0.8);
    CHECK(std::min({dx, dy, dz}) < 1e-6);  // on some face plane
  }
}

TEST_CASE("gt box matches the placed primitive") {
  const Scenario sc = place_object(centered_background(), axis_box(), 5.0);
  CHECK(sc.gt_box.length == 4.0);
  CHECK(sc.gt_box.width == 2.0);
  CHECK(sc.gt_box.height == 1.6);
  CHECK(sc.gt_box.center.x == doctest::Approx(7.0));  // tail at 5, length 4
}

TEST_CASE("distance sweep counts") {
  const PointCloud background = centered_background();
  const ObjectModel model = axis_box();
  CHECK(distance_sweep(background, model).size() == 15);
  CHECK(distance_sweep(background, model, 5.0, 5.0, 1.0).size() == 1);
  CHECK(distance_sweep(background, model, 0.0, 14.0, 2.0).size() == 8);
  CHECK(distance_sweep(background, model, 0.0, 14.0, 7.0).size() == 3);
  CHECK_THROWS_AS(distance_sweep(background, model, 0.0, 14.0, 0.0), InvalidArgument);
}

TEST_CASE("object point count is non-increasing over the sweep") {
  // Axis-centered box: the occluded direction cone at d + delta nests
  // inside the one at d, so grid-ray counts cannot increase. The sensor
  // sits 0.5 m behind the victim's nose.
  const PointCloud background = centered_background();
  const auto scenarios = distance_sweep(background, axis_box(), 0.0, 14.0, 1.0, 0.5);
  REQUIRE(scenarios.size() == 15);
  CHECK(scenarios.front().object_point_count > 0);
  for (std::size_t i = 1; i < scenarios.size(); ++i) {
    CHECK(scenarios[i].object_point_count <= scenarios[i - 1].object_point_count);
  }
}

TEST_CASE("jitter_pose stays inside the box and is seeded") {
  const ObjectModel model = axis_box();
  for (int t = 0; t < 10000; ++t) {
    SplitRng rng(static_cast<std::uint64_t>(t));
    const ObjectModel jittered = jitter_pose(model, 1.0, 1.0, rng);
    CHECK(std::abs(jittered.pose.center.x - model.pose.center.x) <= 1.0);
    CHECK(std::abs(jittered.pose.center.y - model.pose.center.y) <= 1.0);
    CHECK(jittered.pose.center.z == model.pose.center.z);
    CHECK(jittered.pose.yaw == model.pose.yaw);
  }
  SplitRng a(5), b(5);
  const ObjectModel ja = jitter_pose(model, 1.0, 1.0, a);
  const ObjectModel jb = jitter_pose(model, 1.0, 1.0, b);
  CHECK(ja.pose.center.x == jb.pose.center.x);
  CHECK(ja.pose.center.y == jb.pose.center.y);

  SplitRng c(6);
  const ObjectModel frozen = jitter_pose(model, 0.0, 0.0, c);
  CHECK(frozen.pose.center.x == model.pose.center.x);
  CHECK(frozen.pose.center.y == model.pose.center.y);
}

TEST_CASE("mesh scenario: ray hits a triangle wall") {
  // Two triangles forming a 4x4 quad at x = 8 (object frame), facing -x.
  std::vector<Triangle> tris{
      {{8.0, -2.0, -2.0}, {8.0, 2.0, -2.0}, {8.0, 2.0, 2.0}},
      {{8.0, -2.0, -2.0}, {8.0, 2.0, 2.0}, {8.0, -2.0, 2.0}},
  };
  ObjectModel model{tris, Pose{}};
  PointCloud background;
  background.points.push_back(Point{30.0, 0.0, 0.0, 10.0});
  const Scenario sc = place_object(background, model, 8.0);
  // min_x is 8, so the shift places the quad at x = 8 again.
  REQUIRE(sc.object_point_count == 1);
  CHECK(sc.cloud.points[0].x == doctest::Approx(8.0));
}

TEST_CASE("degenerate mesh is rejected") {
  std::vector<Triangle> tris{{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}}};
  const ObjectModel model{tris, Pose{}};
  CHECK_THROWS_AS(place_object(PointCloud{}, model, 1.0), InvalidModel);
}

TEST_CASE("ascii stl round trip through the loader") {
  const fs::path p = fs::temp_directory_path() / "spoofsim_test.stl";
  {
    std::ofstream out(p);
    out << "solid tri\n"
        << " facet normal 0 0 1\n"
        << "  outer loop\n"
        << "   vertex 0 0 0\n"
        << "   vertex 1 0 0\n"
        << "   vertex 0 1 0\n"
        << "  endloop\n"
        << " endfacet\n"
        << "endsolid tri\n";
  }
  const ObjectModel model = load_stl_ascii(p.string());
  REQUIRE_FALSE(model.is_box());
  REQUIRE(model.mesh().size() == 1);
  CHECK(model.mesh()[0].b.x == 1.0);
  fs::remove(p);
}

TEST_CASE("box spec loader") {
  const fs::path p = fs::temp_directory_path() / "spoofsim_box.json";
  {
    std::ofstream out(p);
    out << R"({"box":{"dims":[4.5,1.8,1.5]},"pose":{"center":[0,0.5,0.75],"yaw":0.1}})";
  }
  const ObjectModel model = load_object_model(p.string());
  REQUIRE(model.is_box());
  CHECK(model.box().length == 4.5);
  CHECK(model.pose.center.y == 0.5);
  CHECK(model.pose.yaw == 0.1);
  fs::remove(p);

  CHECK_THROWS_AS(load_object_model("nothing.xyz"), FormatError);
}
