#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "bdd/geometry.hpp"
#include "bdd/kernel.hpp"
#include "bdd/sample.hpp"

// Helpers shared by the unit tests. Reference computations here are written
// independently of the library code they check.
namespace testing {

inline std::shared_ptr<const bdd::Sample> make_sample(std::vector<double> y, std::vector<bdd::PointXY> x) {
  auto s = std::make_shared<bdd::Sample>();
  s->y = std::move(y);
  s->x = std::move(x);
  return s;
}

/// Observations on the x1 axis around (0, 0) with a quadrant-style rule
/// {x1 >= 0}: the signed distance is simply x1.
inline bdd::AssignmentRule right_half() {
  return bdd::PolygonRule{{{0.0, -1e6}, {1e6, -1e6}, {1e6, 1e6}, {0.0, 1e6}}};
}

/// Plain weighted least squares in the raw basis (1, D, ..., D^p) via QR.
inline double wls_intercept(const std::vector<double>& d, const std::vector<double>& y, const std::vector<double>& w,
                            int p) {
  std::vector<int> keep;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (w[i] > 0.0) keep.push_back(static_cast<int>(i));
  }
  Eigen::MatrixXd X(keep.size(), p + 1);
  Eigen::VectorXd Y(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double sw = std::sqrt(w[keep[r]]);
    for (int j = 0; j <= p; ++j) X(r, j) = sw * std::pow(d[keep[r]], j);
    Y(r) = sw * y[keep[r]];
  }
  return X.colPivHouseholderQr().solve(Y)(0);
}

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Inverse normal CDF by bisection on the erfc-based CDF.
inline double phi_inv_bisect(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testing
