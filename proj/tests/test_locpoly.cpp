#include <doctest.h>

#include <random>

#include "bdd/error.hpp"
#include "bdd/locpoly.hpp"
#include "support.hpp"

using namespace bdd;

namespace {

// Column with given signed distances at eval point (0, 0): observations are
// placed on the x1 axis, and the rule treats x1 >= 0.
DistanceColumn axis_column(const std::vector<double>& d, std::vector<PointXY>* xs = nullptr) {
  Sample s;
  for (double v : d) {
    s.x.push_back({v, 0.0});
    s.y.push_back(0.0);
  }
  if (xs) *xs = s.x;
  return build_distance_column(s, {0, 0}, testing::right_half());
}

const KernelSpec kUni{KernelFamily::Uniform};
const KernelSpec kTri{KernelFamily::Triangular};

}  // namespace

TEST_CASE("poly_basis") {
  const auto r = poly_basis(2.0, 3);
  CHECK(r.size() == 4);
  CHECK(r(0) == 1.0);
  CHECK(r(3) == 8.0);
}

TEST_CASE("gram examples") {
  const auto col = axis_column({0.0, 0.5});
  const auto g1 = gram(col, Side::Treated, kUni, 1.0, 0);
  CHECK(g1.entries(0, 0) == doctest::Approx(1.0));
  // D = 0.5 sits on the support edge and is included, so both weights are 1/h^2 = 4.
  const auto g2 = gram(col, Side::Treated, kUni, 0.5, 0);
  CHECK(g2.entries(0, 0) == doctest::Approx(4.0));
  const auto g0 = gram(col, Side::Control, kUni, 1.0, 1);
  CHECK(g0.entries.isZero());
  CHECK(g0.min_eigenvalue == 0.0);
}

TEST_CASE("gram averages over the full sample") {
  // Adding control observations halves the treated Gram.
  const auto a = gram(axis_column({0.1, 0.2}), Side::Treated, kTri, 1.0, 1);
  const auto b = gram(axis_column({0.1, 0.2, -0.1, -0.2}), Side::Treated, kTri, 1.0, 1);
  CHECK((a.entries - 2.0 * b.entries).norm() < 1e-14);
  CHECK((a.entries - a.entries.transpose()).norm() < 1e-12);
}

TEST_CASE("fit_side examples") {
  const auto col = axis_column({0.1, 0.2, 0.3});
  const std::vector<double> y{1, 2, 3};
  const auto f = fit_side(y, col, Side::Treated, kUni, 1.0, 0);
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.n_eff == 3);
  CHECK(f.gamma_hat(0) == f.intercept);

  const std::vector<double> lin{3 + 2 * 0.1, 3 + 2 * 0.2, 3 + 2 * 0.3};
  const auto g = fit_side(lin, col, Side::Treated, kTri, 0.7, 1);
  CHECK(std::abs(g.intercept - 3.0) < 1e-10);
  // Scaled slope is the raw slope times h.
  CHECK(g.gamma_hat(1) == doctest::Approx(2.0 * 0.7));
}

TEST_CASE("fit_side errors") {
  const auto col = axis_column({0.1, 0.2, -0.3});
  const std::vector<double> y{1, 2, 3};
  try {
    fit_side(y, col, Side::Treated, kUni, 0.05, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
    CHECK(std::string(e.what()).find("treated") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_side(y, col, Side::Treated, kUni, 1.0, 2), Error);  // n_eff 2 < 3
  // Two observations at the same distance: enough points but a singular Gram for p = 1.
  const auto dup = axis_column({0.2, 0.2});
  try {
    fit_side(std::vector<double>{1, 2}, dup, Side::Treated, kUni, 1.0, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularGram);
    REQUIRE(e.value().has_value());
    CHECK(*e.value() < kMinGramEigenvalue);
  }
}

TEST_CASE("fit_point examples") {
  std::vector<PointXY> xs;
  const std::vector<double> d{-0.4, -0.2, -0.1, 0.1, 0.25, 0.5};
  auto col = axis_column(d, &xs);
  std::vector<double> y;
  for (double v : d) y.push_back(v >= 0 ? 5.0 : 3.0);
  auto sample = testing::make_sample(y, xs);
  const auto fit = fit_point(sample, col, kTri, 1.0, 1);
  CHECK(fit.theta_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.theta_hat == fit.fit1.intercept - fit.fit0.intercept);
  CHECK_FALSE(fit.xi_hat.has_value());

  // Mirror-symmetric design with identical outcomes -> zero effect.
  const std::vector<double> m{-0.3, -0.2, -0.1, 0.1, 0.2, 0.3};
  std::vector<PointXY> mx;
  auto mcol = axis_column(m, &mx);
  const std::vector<double> my{1.5, 0.7, 2.0, 2.0, 0.7, 1.5};
  const auto mf = fit_point(testing::make_sample(my, mx), mcol, kTri, 0.5, 1);
  CHECK(std::abs(mf.theta_hat) < 1e-12);
}

TEST_CASE("fit_point through the geometry overload") {
  auto sample = testing::make_sample({1, 2, 4, 5}, {{1, 1}, {2, 0.5}, {-1, 0.5}, {0.5, -1}});
  const auto f = fit_point(sample, PointXY{0, 0}, QuadrantRule{}, DistanceMetric::euclidean(), kUni, 10.0, 0);
  CHECK(f.fit1.intercept == doctest::Approx(1.5));
  CHECK(f.fit0.intercept == doctest::Approx(4.5));
  CHECK(f.theta_hat == doctest::Approx(-3.0));
}

TEST_CASE("side fit matches raw-basis weighted least squares") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(60), y(60);
    for (auto& v : d) v = u(gen);
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = std::sin(3 * d[i]) + 0.1 * z(gen);
    const auto col = axis_column(d);
    const double h = 0.6 + 0.3 * std::abs(u(gen));
    for (int p : {0, 1, 2}) {
      const auto f = fit_side(y, col, Side::Treated, kTri, h, p);
      std::vector<double> w(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) w[i] = d[i] >= 0 ? std::max(0.0, 1 - std::abs(d[i]) / h) : 0.0;
      CHECK(f.intercept == doctest::Approx(testing::wls_intercept(d, y, w, p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("kernel-scale invariance and uniform nesting") {
  const std::vector<double> d{0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 0.9};
  const std::vector<double> y{1, 3, 2, 5, 4, 6, 3};
  const auto col = axis_column(d);
  // All |D| < 1, so the uniform kernel at h = 1 and h = 2 has the same support and
  // weights differing only by the constant 1/4.
  for (int p : {0, 1, 2}) {
    const auto a = fit_side(y, col, Side::Treated, kUni, 1.0, p);
    const auto b = fit_side(y, col, Side::Treated, kUni, 2.0, p);
    CHECK(a.intercept == doctest::Approx(b.intercept).epsilon(1e-12));
  }
  std::size_t prev = 0;
  for (double h = 0.1; h < 1.2; h += 0.05) {
    try {
      const auto f = fit_side(y, col, Side::Treated, kUni, h, 0);
      CHECK(f.n_eff >= prev);
      prev = f.n_eff;
    } catch (const Error&) {
    }
  }
}

TEST_CASE("local observations are the positively weighted side members, sorted") {
  const auto col = axis_column({0.3, -0.1, 0.9, 0.2, 1.5});
  const std::vector<double> y{1, 2, 3, 4, 5};
  const auto f = fit_side(y, col, Side::Treated, kTri, 1.0, 0);
  REQUIRE(f.local.size() == 3);
  CHECK(f.local[0].index == 0);
  CHECK(f.local[1].index == 2);
  CHECK(f.local[2].index == 3);
  for (const auto& o : f.local) CHECK(o.weight > 0.0);
}
