#pragma once

#include <functional>
#include <span>

namespace bdd {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< summed Kronrod-Gauss difference over accepted panels
  int evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 50;
  int max_evaluations = 2'000'000;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. `breaks`
/// (any order, points outside (a, b) ignored) are always panel edges.
/// Throws ToleranceFailed if the error target is not met.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks = {}, const QuadratureOptions& opts = {});

}  // namespace bdd
