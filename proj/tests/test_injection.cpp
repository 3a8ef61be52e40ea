// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "spoofsim/injection.hpp"

using namespace spoofsim;

namespace {

PointCloud random_pattern(std::size_t n, std::uint64_t seed, double min_range = 5.0,
                          double max_range = 30.0) {
  SplitRng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  while (cloud.points.size() < n) {
    Point p{rng.uniform(-max_range, max_range), rng.uniform(-max_range, max_range),
            rng.uniform(-3.0, 3.0), 200.0};
    if (p.range() < min_range || p.range() > max_range) continue;
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace

TEST_CASE("downsample keeps the full pattern when n equals its size") {
  const PointCloud pattern = random_pattern(50, 1);
  SplitRng rng(2);
  const PointCloud out = downsample_pattern(pattern, 50, rng);
  REQUIRE(out.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(out.points[i].x == pattern.points[i].x);
}

TEST_CASE("downsample to zero and over-size") {
  const PointCloud pattern = random_pattern(10, 3);
  SplitRng rng(4);
  CHECK(downsample_pattern(pattern, 0, rng).empty());
  CHECK_THROWS_AS(downsample_pattern(pattern, 11, rng), InvalidArgument);
}

TEST_CASE("downsample yields an exact-size ordered subset") {
  const PointCloud pattern = random_pattern(2000, 5);
  SplitRng rng(6);
  const PointCloud out = downsample_pattern(pattern, 100, rng);
  REQUIRE(out.size() == 100);

  // Every output point is an input point, and relative order is preserved.
  std::size_t cursor = 0;
  for (const Point& q : out.points) {
    bool found = false;
    while (cursor < pattern.size()) {
      const Point& p = pattern.points[cursor++];
      if (p.x == q.x && p.y == q.y && p.z == q.z) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("downsample selects each index at rate n/N") {
  const std::size_t N = 200;
  const std::size_t n = 50;
  const PointCloud pattern = random_pattern(N, 7);
  std::vector<int> hits(N, 0);
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    SplitRng rng(1000 + static_cast<std::uint64_t>(t));
    const PointCloud out = downsample_pattern(pattern, n, rng);
    std::size_t cursor = 0;
    for (const Point& q : out.points) {
      while (cursor < N && pattern.points[cursor].x != q.x) ++cursor;
      if (cursor < N) ++hits[cursor];
    }
  }
  // Binomial(trials, 0.25): mean 500, sd ~19.4; 6 sigma keeps flakiness out.
  const double expect = static_cast<double>(trials) * n / N;
  const double sd = std::sqrt(expect * 0.75);
  for (std::size_t i = 0; i < N; ++i) {
    CHECK(std::abs(hits[i] - expect) < 6.0 * sd);
  }
}

TEST_CASE("zero-error injection is the identity on coordinates") {
  InjectionSpec spec;
  spec.pattern = random_pattern(500, 8);
  spec.inner_sigma_m = 0.0;
  spec.inter_sigma_m = 0.0;
  spec.rand_model = RandModel::none();
  spec.seed = 99;
  const PointCloud out = apply_injection(spec);
  REQUIRE(out.size() == spec.pattern.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.points[i].x == spec.pattern.points[i].x);
    CHECK(out.points[i].y == spec.pattern.points[i].y);
    CHECK(out.points[i].z == spec.pattern.points[i].z);
    CHECK(out.points[i].intensity == 255.0);
  }
}

TEST_CASE("forced draws follow the displacement formula exactly") {
  PointCloud pattern;
  pattern.points.push_back(Point{10.0, 0.0, 0.0, 100.0});
  // delta_rand = 0, delta_inner = 0.1, delta_inter = 0.35
  const PointCloud out = displace_along_rays(
      pattern, [](std::size_t) { return 0.0; }, [](std::size_t) { return 0.1; }, 0.35, 255.0);
  REQUIRE(out.size() == 1);
  CHECK(out.points[0].x == doctest::Approx(10.45).epsilon(1e-12));
  CHECK(out.points[0].y == 0.0);
  CHECK(out.points[0].z == 0.0);
}

TEST_CASE("displacements are collinear with the ray") {
  InjectionSpec spec;
  spec.pattern = random_pattern(2000, 9);
  spec.rand_model = RandModel::none();
  spec.seed = 5;
  const PointCloud out = apply_injection(spec);
  // Default sigmas never displace a 5+ m point past the sensor, so the
  // input/output pairing is positional.
  REQUIRE(out.size() == spec.pattern.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec3 x = spec.pattern.points[i].position();
    const Vec3 y = out.points[i].position();
    const Vec3 disp = y - x;
    const Vec3 g = x / x.norm();
    CHECK(disp.cross(g).norm() < 1e-9 * disp.norm() + 1e-12);
  }
}

TEST_CASE("single inter-frame draw couples all displacements in one call") {
  InjectionSpec spec;
  spec.pattern = random_pattern(300, 10);
  spec.inner_sigma_m = 0.0;
  spec.rand_model = RandModel::none();
  spec.inter_sigma_m = 0.35;
  spec.seed = 123;
  const PointCloud out = apply_injection(spec);
  REQUIRE(out.size() == spec.pattern.size());
  const double first = out.points[0].range() - spec.pattern.points[0].range();
  CHECK(first != 0.0);
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d = out.points[i].range() - spec.pattern.points[i].range();
    CHECK(d == doctest::Approx(first).epsilon(1e-9));
  }
}

TEST_CASE("injection is deterministic under a fixed seed") {
  InjectionSpec spec;
  spec.pattern = random_pattern(200, 11);
  spec.downsample_n = 120;
  spec.rand_model = RandModel::uniform(45.0);
  spec.seed = 2024;
  const PointCloud a = apply_injection(spec);
  const PointCloud b = apply_injection(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.points[i].z == b.points[i].z);
  }
}

TEST_CASE("points pushed past the sensor are dropped") {
  PointCloud pattern;
  pattern.points.push_back(Point{2.0, 0.0, 0.0});
  const PointCloud out = displace_along_rays(
      pattern, [](std::size_t) { return 0.0; }, [](std::size_t) { return -5.0; }, 0.0, 255.0);
  CHECK(out.empty());
}

TEST_CASE("zero-norm pattern point raises DegenerateRay") {
  InjectionSpec spec;
  spec.pattern.points.push_back(Point{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(apply_injection(spec), DegenerateRay);
}

TEST_CASE("per-altitude inner sigma override is honored") {
  InjectionSpec spec;
  Point ring0{10.0, 0.0, 0.0};
  ring0.channel = Channel{0, 0};
  Point ring1{0.0, 10.0, 0.0};
  ring1.channel = Channel{1, 0};
  for (int i = 0; i < 400; ++i) {
    spec.pattern.points.push_back(ring0);
    spec.pattern.points.push_back(ring1);
  }
  spec.inter_sigma_m = 0.0;
  spec.rand_model = RandModel::none();
  spec.inner_sigma_per_altitude = std::vector<double>{0.0, 1.0};  // ring 0 frozen
  spec.seed = 8;
  const PointCloud out = apply_injection(spec);
  double spread1 = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.points[i].range() - 10.0;
    if (spec.pattern.points[i].channel->altitude_index == 0) {
      CHECK(d == doctest::Approx(0.0));
    } else {
      spread1 += d * d;
    }
  }
  CHECK(std::sqrt(spread1 / 400.0) > 0.5);  // ring 1 visibly perturbed
}

TEST_CASE("frustum error with zero variance gives the mean shift") {
  PointCloud pattern;
  pattern.points.push_back(Point{5.0, 1.0, -0.5});
  FrustumErrorModel model;
  model.forward_sigma = model.left_sigma = model.up_sigma = 0.0;
  SplitRng rng(1);
  const PointCloud out = apply_frustum_error(pattern, rng, model);
  REQUIRE(out.size() == 1);
  CHECK(out.points[0].x == doctest::Approx(6.0));
  CHECK(out.points[0].y == doctest::Approx(1.0));
  CHECK(out.points[0].z == doctest::Approx(0.5));
}

TEST_CASE("frustum error mean forward offset approaches 1") {
  const PointCloud pattern = random_pattern(100000, 12);
  SplitRng rng(3);
  const PointCloud out = apply_frustum_error(pattern, rng);
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    sum += out.points[i].x - pattern.points[i].x;
  }
  CHECK(std::abs(sum / static_cast<double>(out.size()) - 1.0) < 0.01);
}

TEST_CASE("merge_into_scene identities") {
  const PointCloud pattern = random_pattern(20, 13);
  const PointCloud merged_empty_scene =
      merge_into_scene(PointCloud{}, pattern, MergePolicy::Replace);
  CHECK(merged_empty_scene.size() == pattern.size());

  const PointCloud merged_empty_spoof =
      merge_into_scene(pattern, PointCloud{}, MergePolicy::Replace);
  CHECK(merged_empty_spoof.size() == pattern.size());
}

TEST_CASE("replace policy removes scene points in spoofed bins only") {
  PointCloud scene;
  scene.points.push_back(Point{20.0, 0.0, 0.0, 10.0});  // az 0, same bin as the spoof
  scene.points.push_back(Point{0.0, 20.0, 0.0, 10.0});  // az 90, untouched
  PointCloud spoofed;
  spoofed.points.push_back(Point{10.0, 0.001, 0.0, 255.0});  // bin 0 at 0.1 deg

  const PointCloud replaced = merge_into_scene(scene, spoofed, MergePolicy::Replace, 0.1);
  REQUIRE(replaced.size() == 2);
  CHECK(replaced.points[0].y == 20.0);           // survivor is the az-90 scene point
  CHECK(replaced.points[1].intensity == 255.0);  // then the spoofed point

  const PointCloud appended = merge_into_scene(scene, spoofed, MergePolicy::Append, 0.1);
  CHECK(appended.size() == 3);
}
