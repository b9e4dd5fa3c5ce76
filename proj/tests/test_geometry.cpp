#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bdd/error.hpp"
#include "bdd/geometry.hpp"

using namespace bdd;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance({1, 1}, {1, 1}) == 0.0);
  CHECK(distance({0, 0}, {1, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("distance rejects non-finite input") {
  const double nan = std::nan("");
  CHECK_THROWS_AS(distance({nan, 0}, {0, 0}), Error);
  try {
    distance({0, 0}, {INFINITY, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
}

TEST_CASE("euclidean metric axioms on random points") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int k = 0; k < 500; ++k) {
    const PointXY a{u(gen), u(gen)}, b{u(gen), u(gen)}, c{u(gen), u(gen)};
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    CHECK(distance(a, a) == 0.0);
  }
}

TEST_CASE("custom metrics are probed") {
  const auto l1 = DistanceMetric::custom("l1", [](const PointXY& a, const PointXY& b) {
    return std::abs(a.x1 - b.x1) + std::abs(a.x2 - b.x2);
  });
  CHECK(l1({0, 0}, {1, 2}) == 3.0);
  CHECK_FALSE(l1.is_euclidean());
  // Squared distance violates the triangle inequality.
  CHECK_THROWS_AS(DistanceMetric::custom("sq",
                                         [](const PointXY& a, const PointXY& b) {
                                           const double d = std::hypot(a.x1 - b.x1, a.x2 - b.x2);
                                           return d * d;
                                         }),
                  Error);
  // Not symmetric.
  CHECK_THROWS_AS(DistanceMetric::custom("skew",
                                         [](const PointXY& a, const PointXY& b) {
                                           return std::hypot(a.x1 - b.x1, a.x2 - b.x2) * (a.x1 < b.x1 ? 1.0 : 2.0);
                                         }),
                  Error);
}

TEST_CASE("signed distance examples") {
  const AssignmentRule q = QuadrantRule{};
  CHECK(signed_distance({1, 1}, {0, 0}, q) == doctest::Approx(std::sqrt(2.0)));
  CHECK(signed_distance({-1, 0}, {0, 0}, q) == -1.0);
  const double zero = signed_distance({0, 0}, {0, 0}, q);
  CHECK(zero == 0.0);
  CHECK_FALSE(std::signbit(zero));
}

TEST_CASE("quadrant rule sign conventions") {
  const AssignmentRule q = QuadrantRule{false, true};
  CHECK(q.treated({-1, 1}));
  CHECK(q.treated({0, 0}));
  CHECK_FALSE(q.treated({1, 1}));
  CHECK_FALSE(q.treated({-1, -1}));
}

TEST_CASE("polygon rule: interior, exterior, and edges belong to treatment") {
  const AssignmentRule sq = PolygonRule{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  CHECK(sq.treated({1, 1}));
  CHECK_FALSE(sq.treated({3, 1}));
  CHECK(sq.treated({2, 1}));
  CHECK(sq.treated({0, 0}));
  CHECK(sq.treated({1, 2 + 1e-13}));
  CHECK_FALSE(sq.treated({1, 2 + 1e-9}));
  CHECK_THROWS_AS(AssignmentRule(PolygonRule{{{0, 0}, {1, 0}}}), Error);
}

TEST_CASE("signed distance flips sign exactly across the region boundary") {
  // Property: for random triangles and points, the sign of D follows membership for any eval point.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 50; ++t) {
    const AssignmentRule tri = PolygonRule{{{u(gen), u(gen)}, {u(gen), u(gen)}, {u(gen), u(gen)}}};
    const PointXY b{u(gen), u(gen)};
    for (int k = 0; k < 50; ++k) {
      const PointXY x{u(gen), u(gen)};
      if (x == b) continue;
      const double d = signed_distance(x, b, tri);
      CHECK((d > 0.0) == tri.treated(x));
      CHECK(std::abs(d) == doctest::Approx(distance(x, b)));
    }
  }
}

TEST_CASE("polyline validation and arclength") {
  CHECK_THROWS_AS(BoundaryPolyline({{0, 0}}), Error);
  CHECK_THROWS_AS(BoundaryPolyline({{0, 0}, {0, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(BoundaryPolyline({{0, 0}, {NAN, 0}}), Error);
  CHECK_THROWS_AS(BoundaryPolyline({{0, 0}, {1, 0}, {2, 0}}, {0}), Error);
  CHECK_THROWS_AS(BoundaryPolyline({{0, 0}, {1, 0}, {2, 0}}, {2}), Error);
  const BoundaryPolyline L({{0, 2}, {0, 0}, {2, 0}});
  CHECK(L.length() == 4.0);
  CHECK(L.cumulative_arclength() == std::vector<double>{0, 2, 4});
  CHECK(L.kink_indices() == std::set<std::size_t>{1});
  CHECK(L.distance_to({1, 1}) == doctest::Approx(1.0));
  CHECK(L.distance_to({-3, -4}) == doctest::Approx(5.0));
  const BoundaryPolyline explicit_none({{0, 2}, {0, 0}, {2, 0}}, std::set<std::size_t>{});
  CHECK(explicit_none.kink_indices().empty());
}

TEST_CASE("length inside a ball") {
  const BoundaryPolyline L({{0, 2}, {0, 0}, {2, 0}});
  CHECK(L.length_within({0, 0}, 1.0) == doctest::Approx(2.0));
  CHECK(L.length_within({1, 0}, 0.5) == doctest::Approx(1.0));
  CHECK(L.length_within({5, 5}, 1.0) == 0.0);
  CHECK(L.length_within({0, 0}, 10.0) == doctest::Approx(4.0));
}

TEST_CASE("make_grid examples") {
  const BoundaryPolyline L({{0, 2}, {0, 0}, {2, 0}});
  const auto g = make_grid(L, 5);
  const std::vector<PointXY> want{{0, 2}, {0, 1}, {0, 0}, {1, 0}, {2, 0}};
  REQUIRE(g.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(g.points[k].x1 == doctest::Approx(want[k].x1));
    CHECK(g.points[k].x2 == doctest::Approx(want[k].x2));
  }
  const BoundaryPolyline seg({{0, 0}, {1, 0}});
  const auto g2 = make_grid(seg, 2);
  CHECK(g2.points[0] == PointXY{0, 0});
  CHECK(g2.points[1] == PointXY{1, 0});
  const auto g3 = make_grid(seg, 3);
  CHECK(g3.points[1].x1 == doctest::Approx(0.5));
  const auto g1 = make_grid(seg, 1);
  CHECK(g1.points[0].x1 == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_grid(seg, 0), Error);
}

TEST_CASE("make_grid spacing is uniform and points lie on the polyline") {
  const BoundaryPolyline zig({{0, 0}, {3, 1}, {4, 5}, {-2, 7}, {-2.5, 9}});
  for (std::size_t m : {2u, 7u, 21u, 100u}) {
    const auto g = make_grid(zig, m);
    const double gap = zig.length() / static_cast<double>(m - 1);
    for (std::size_t k = 1; k < m; ++k) CHECK(g.arclengths[k] - g.arclengths[k - 1] == doctest::Approx(gap).epsilon(1e-10));
    for (const auto& p : g.points) CHECK(zig.distance_to(p) < 1e-12);
  }
}

TEST_CASE("detect_kinks examples") {
  CHECK(detect_kinks({{0, 2}, {0, 0}, {2, 0}}, 0.01) == std::set<std::size_t>{1});
  CHECK(detect_kinks({{0, 0}, {1, 0}, {2, 0}}, 0.01).empty());
  const double a = 0.005;
  CHECK(detect_kinks({{0, 0}, {1, 0}, {1 + std::cos(a), std::sin(a)}}, 0.01).empty());
  CHECK(detect_kinks({{0, 0}, {1, 0}, {1 + std::cos(0.02), std::sin(0.02)}}, 0.01) == std::set<std::size_t>{1});
  CHECK_THROWS_AS(detect_kinks({{0, 0}, {1, 0}}, 0.0), Error);
  CHECK_THROWS_AS(detect_kinks({{0, 0}, {1, 0}}, std::numbers::pi / 2), Error);
}

TEST_CASE("dense smooth arc has no kinks at the default tolerance") {
  std::vector<PointXY> arc;
  for (int k = 0; k <= 200; ++k) {
    const double t = std::numbers::pi * k / 200.0;
    arc.push_back({std::cos(t), std::sin(t)});
  }
  CHECK(BoundaryPolyline(arc).kink_indices().empty());
}
