#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bdd/error.hpp"
#include "bdd/quadrature.hpp"

using namespace bdd;

TEST_CASE("polynomials are exact") {
  const auto r = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
  CHECK(r.value == doctest::Approx(9.0 - 3.0 + 3.0).epsilon(1e-14));
  CHECK(r.evaluations == 15);
}

TEST_CASE("smooth and oscillatory integrands") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0).value ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::cos(50 * x); }, 0.0, 1.0).value ==
        doctest::Approx(std::sin(50.0) / 50).epsilon(1e-10));
}

TEST_CASE("kinks are handled with and without a break") {
  const auto f = [](double x) { return std::abs(x - 0.3); };
  const double exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
  const std::vector<double> br{0.3, 7.0, -2.0};
  const auto with = integrate(f, 0.0, 1.0, br);
  CHECK(with.value == doctest::Approx(exact).epsilon(1e-14));
  CHECK(with.evaluations == 30);
  CHECK(integrate(f, 0.0, 1.0).value == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("integrable endpoint singularity") {
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, {1e-9, 1e-9, 60, 2'000'000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("reversed and empty intervals") {
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0).value == doctest::Approx(-0.5));
  CHECK(integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("non-convergence is reported") {
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, {}, {1e-15, 1e-15, 4, 200});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ToleranceFailed);
  }
}
