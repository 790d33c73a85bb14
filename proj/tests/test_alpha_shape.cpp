#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kkb/alpha_shape.hpp"
#include "support.hpp"

using namespace kkb;

TEST_CASE("square with centre") {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto b = alpha_shape_boundary(pts, std::sqrt(2.0));
  CHECK(b == std::vector<bool>{true, true, true, true, false});
}

TEST_CASE("triangle is all boundary") {
  const std::vector<Point2> pts{{0, 0}, {3, 0}, {1, 2}};
  CHECK(alpha_shape_boundary(pts, 10.0) == std::vector<bool>(3, true));
}

TEST_CASE("collinear points are all boundary") {
  const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK(alpha_shape_boundary(pts, 1.0) == std::vector<bool>(4, true));
}

TEST_CASE("infinite alpha gives the convex hull") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(28);
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    const auto got = alpha_shape_boundary(pts, std::numeric_limits<double>::infinity());
    REQUIRE(got == testing::brute_force_hull(pts));
  }
}

TEST_CASE("delaunay empty-circle property") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(120);
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    const auto tri = delaunay_triangulate(pts);
    REQUIRE(tri.triangles.size() >= n - 2);
    for (const auto& t : tri.triangles) {
      const Point2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
      const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
      REQUIRE(area > 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        if (static_cast<int>(k) == t[0] || static_cast<int>(k) == t[1] ||
            static_cast<int>(k) == t[2])
          continue;
        const Point2 d = pts[k];
        const double adx = a.x - d.x, ady = a.y - d.y;
        const double bdx = b.x - d.x, bdy = b.y - d.y;
        const double cdx = c.x - d.x, cdy = c.y - d.y;
        const double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                           (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                           (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
        REQUIRE(det <= 1e-12);
      }
    }
  }
}

TEST_CASE("grid with duplicates and collinear runs") {
  std::vector<Point2> pts;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) pts.push_back({double(i), double(j)});
  pts.push_back({2, 2});
  const auto b = alpha_shape_boundary(pts, 1.0);
  for (std::size_t k = 0; k < 36; ++k) {
    const int i = static_cast<int>(k) / 6, j = static_cast<int>(k) % 6;
    CHECK(b[k] == (i == 0 || j == 0 || i == 5 || j == 5));
  }
  CHECK_FALSE(b[36]);
}

TEST_CASE("holes are optional") {
  // ring of points around an empty centre
  std::vector<Point2> pts;
  for (int r = 3; r <= 5; ++r) {
    const int count = 8 * r;
    for (int k = 0; k < count; ++k) {
      const double a = 2 * std::numbers::pi * k / count;
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
  }
  const auto outer = alpha_shape_boundary(pts, 1.0, false);
  const auto holes = alpha_shape_boundary(pts, 1.0, true);
  std::size_t n_outer = 0, n_holes = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    n_outer += outer[i];
    n_holes += holes[i];
    if (i < 24) CHECK(holes[i]);
    if (i >= 56) CHECK(outer[i]);
    if (i < 56) CHECK_FALSE(outer[i]);
  }
  CHECK(n_holes > n_outer);
}

TEST_CASE("property: alpha shape ignores rigid motions and scaling") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(80);
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {rng.uniform(0, 100), rng.uniform(0, 100)};
    const double alpha = rng.uniform(8.0, 40.0);
    const double theta = rng.uniform(0, 2 * std::numbers::pi);
    const double s = rng.uniform(0.1, 10.0);
    const Point2 t{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    std::vector<Point2> moved(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = pts[i];
      moved[i] = {s * (p.x * std::cos(theta) - p.y * std::sin(theta)) + t.x,
                  s * (p.x * std::sin(theta) + p.y * std::cos(theta)) + t.y};
    }
    REQUIRE(alpha_shape_boundary(pts, alpha) == alpha_shape_boundary(moved, s * alpha));
  }
}
