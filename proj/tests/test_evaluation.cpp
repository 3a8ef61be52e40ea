// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "spoofsim/evaluation.hpp"
#include "spoofsim/rng.hpp"

using namespace spoofsim;

namespace {

OrientedBox make_box(double cx, double cy, double l, double w, double yaw,
                     double cz = 0.0, double h = 1.5) {
  OrientedBox b;
  b.center = {cx, cy, cz};
  b.length = l;
  b.width = w;
  b.height = h;
  b.yaw = yaw;
  return b;
}

// Rasterization reference for BEV IoU: counts cell centers of an n x n
// grid over the joint footprint inside each box.
double grid_iou(const OrientedBox& a, const OrientedBox& b, int n = 1000) {
  double lo_x = 1e18, lo_y = 1e18, hi_x = -1e18, hi_y = -1e18;
  for (const OrientedBox* box : {&a, &b}) {
    for (const Vec2& c : box->corners_bev()) {
      lo_x = std::min(lo_x, c.x);
      lo_y = std::min(lo_y, c.y);
      hi_x = std::max(hi_x, c.x);
      hi_y = std::max(hi_y, c.y);
    }
  }
  const double dx = (hi_x - lo_x) / n;
  const double dy = (hi_y - lo_y) / n;
  long in_a = 0, in_b = 0, in_both = 0;
  for (int i = 0; i < n; ++i) {
    const double x = lo_x + (i + 0.5) * dx;
    for (int j = 0; j < n; ++j) {
      const double y = lo_y + (j + 0.5) * dy;
      const bool pa = a.contains_bev(x, y);
      const bool pb = b.contains_bev(x, y);
      in_a += pa;
      in_b += pb;
      in_both += pa && pb;
    }
  }
  const long uni = in_a + in_b - in_both;
  return uni == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(uni);
}

OrientedBox random_box(SplitRng& rng) {
  return make_box(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(2.0, 5.0),
                  rng.uniform(1.0, 3.0), rng.uniform(0.0, kPi));
}

}  // namespace

TEST_CASE("iou of identical boxes is 1") {
  const OrientedBox b = make_box(3.0, -1.0, 4.2, 1.8, 0.7);
  CHECK(iou_bev(b, b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iou of far-apart boxes is 0") {
  const OrientedBox a = make_box(0.0, 0.0, 1.0, 1.0, 0.0);
  const OrientedBox b = make_box(100.0, 0.0, 1.0, 1.0, 0.3);
  CHECK(iou_bev(a, b) == 0.0);
}

TEST_CASE("analytic case: 2x2 boxes offset by 1 give 1/3") {
  const OrientedBox a = make_box(0.0, 0.0, 2.0, 2.0, 0.0);
  const OrientedBox b = make_box(1.0, 0.0, 2.0, 2.0, 0.0);
  CHECK(iou_bev(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("edge-touching boxes give exactly zero") {
  const OrientedBox a = make_box(0.0, 0.0, 2.0, 2.0, 0.0);
  const OrientedBox b = make_box(2.0, 0.0, 2.0, 2.0, 0.0);
  CHECK(iou_bev(a, b) == 0.0);
}

TEST_CASE("iou is exactly symmetric and bounded") {
  SplitRng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = random_box(rng);
    const double ab = iou_bev(a, b);
    const double ba = iou_bev(b, a);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("iou agrees with the grid rasterization oracle") {
  SplitRng rng(23);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = random_box(rng);
    const double exact = iou_bev(a, b);
    const double approx = grid_iou(a, b);
    worst = std::max(worst, std::abs(exact - approx));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("injection and removal success criteria") {
  const OrientedBox gt = make_box(10.0, 0.0, 4.0, 2.0, 0.0);
  DetectionRecord hit;
  hit.box = gt;
  hit.score = 0.9;
  hit.label = "object";
  DetectionRecord miss;
  miss.box = make_box(50.0, 20.0, 4.0, 2.0, 0.0);
  miss.score = 0.9;
  miss.label = "object";
  DetectionRecord touching;
  touching.box = make_box(14.0, 0.0, 4.0, 2.0, 0.0);  // shares the x=12 edge
  touching.score = 0.5;
  touching.label = "object";

  CHECK_FALSE(injection_success({}, gt));
  CHECK(injection_success({hit}, gt));
  CHECK_FALSE(injection_success({touching}, gt));

  CHECK(removal_success({}, gt));
  CHECK_FALSE(removal_success({hit}, gt));
  CHECK(removal_success({miss, touching}, gt));
  CHECK_FALSE(removal_success({miss, hit}, gt));
}

TEST_CASE("count_injected thresholds strictly") {
  PointCloud benign;
  for (int i = 0; i < 100; ++i) benign.points.push_back(Point{10.0, 0.0, 0.0, 60.0});
  PointCloud attacked = benign;
  CHECK(count_injected(benign, attacked, 80.0) == 0);

  for (int i = 0; i < 50; ++i) attacked.points.push_back(Point{5.0, 1.0, 0.0, 255.0});
  CHECK(count_injected(benign, attacked, 80.0) == 50);
  CHECK(count_injected(benign, attacked, 255.0) == 0);  // strict comparison
}

TEST_CASE("count_removed on constructed ground truth") {
  SplitRng rng(31);
  PointCloud benign;
  for (int i = 0; i < 500; ++i) {
    benign.points.push_back(Point{rng.uniform(5.0, 50.0), rng.uniform(-20.0, 20.0),
                                  rng.uniform(-2.0, 2.0), 50.0});
  }
  CHECK(count_removed(benign, benign, 80.0) == 0);

  PointCloud attacked = benign;
  attacked.points.erase(attacked.points.begin() + 100, attacked.points.begin() + 130);
  CHECK(count_removed(benign, attacked, 80.0) == 30);

  // A point displaced by twice the tolerance no longer matches.
  PointCloud displaced = benign;
  displaced.points[7].x += 0.02;
  CHECK(count_removed(benign, displaced, 80.0, 0.01) == 1);

  // Spoofed points above threshold do not count as survivors.
  PointCloud spoof_only = benign;
  spoof_only.points[3].intensity = 255.0;
  CHECK(count_removed(benign, spoof_only, 80.0) == 1);
}

TEST_CASE("count_removed uses exact channel matching when indexed") {
  PointCloud benign;
  for (int i = 0; i < 10; ++i) {
    Point p{10.0 + i, 0.0, 0.0, 50.0};
    p.channel = Channel{0, i};
    benign.points.push_back(p);
  }
  PointCloud attacked = benign;
  attacked.points.erase(attacked.points.begin() + 4);  // channel (0,4) gone
  // Positions of survivors coincide with benign neighbors only at 1 m
  // spacing, far over the tolerance; channel matching must catch it anyway.
  CHECK(count_removed(benign, attacked, 80.0) == 1);
}

TEST_CASE("removal percentage per azimuth on constructed pies") {
  PointCloud benign;
  // 200 points in the bin starting at 10 deg (bin 10 at 1 deg width),
  // 100 points in bin 45.
  for (int i = 0; i < 200; ++i) {
    benign.points.push_back(from_spherical({20.0, 10.2 + 0.002 * i, 0.0}));
    benign.points.back().intensity = 50.0;
  }
  for (int i = 0; i < 100; ++i) {
    benign.points.push_back(from_spherical({20.0, 45.2 + 0.002 * i, 0.0}));
    benign.points.back().intensity = 50.0;
  }

  SUBCASE("identical clouds give all-zero percentages") {
    const auto table = removal_percentage_per_azimuth(benign, benign, 1.0, 80.0);
    REQUIRE(table.size() == 2);
    CHECK(table.at(10) == 0.0);
    CHECK(table.at(45) == 0.0);
  }

  SUBCASE("one bin fully emptied") {
    PointCloud attacked = benign;
    attacked.points.erase(attacked.points.begin(), attacked.points.begin() + 200);
    const auto table = removal_percentage_per_azimuth(benign, attacked, 1.0, 80.0);
    CHECK(table.at(10) == 1.0);
    CHECK(table.at(45) == 0.0);
  }

  SUBCASE("exactly half of one bin removed") {
    PointCloud attacked = benign;
    attacked.points.erase(attacked.points.begin(), attacked.points.begin() + 100);
    const auto table = removal_percentage_per_azimuth(benign, attacked, 1.0, 80.0);
    CHECK(table.at(10) == 0.5);
    CHECK(table.at(45) == 0.0);
  }

  SUBCASE("empty bins are absent") {
    const auto table = removal_percentage_per_azimuth(benign, benign, 1.0, 80.0);
    CHECK_FALSE(table.contains(200));
  }
}

TEST_CASE("success_rate aggregation") {
  CHECK(success_rate({true}).success_rate == 1.0);
  CHECK(success_rate({true, false}).success_rate == 0.5);

  std::vector<bool> outcomes(100, false);
  for (int i = 0; i < 37; ++i) outcomes[i] = true;
  const EvalReport r = success_rate(outcomes);
  CHECK(r.trials == 100);
  CHECK(r.successes == 37);
  CHECK(r.success_rate == doctest::Approx(0.37));
  CHECK(r.per_trial.size() == 100);

  CHECK_THROWS_AS(success_rate({}), InvalidArgument);
}
