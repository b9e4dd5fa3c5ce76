#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "bdd/geometry.hpp"
#include "bdd/kernel.hpp"

namespace bdd {

/// Circle of radius `radius` around a boundary point, with the regression
/// function and score density to be averaged over its admissible arcs.
struct ArcScene {
  PointXY center;
  double radius = 0.0;
  AssignmentRule rule;
  std::function<double(const PointXY&)> mu;
  std::function<double(const PointXY&)> density;
};

struct ArcOptions {
  int angle_samples = 1024;
  double bisection_tol = 1e-12;
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
};

/// theta_{t,x}(r): density-weighted mean of mu over the side-t part of the
/// circle. Throws NoMass if that part is empty or carries zero density.
double induced_theta(const ArcScene& scene, Side side, const ArcOptions& opts = {});

/// Closed form of theta_{1,(s,0)}(r) for mu = x2, uniform density and the
/// first-quadrant treated region: 2r/pi for r <= s, (r+s)/(pi - arccos(s/r)) otherwise.
double corner_theta(double s, double r);

/// Population Gram A(s) and moment B(s) of the corner example at unit bandwidth.
struct BiasFunctionals {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  double quadrature_error = 0.0;
};

/// A(s), B(s) for the treated side of the corner example (mu1 = x2, first
/// quadrant, point (s, 0)). Negative s places the point at (s, 0) in the
/// control region, which extends the functions smoothly through s = 0.
BiasFunctionals bias_functionals(const KernelSpec& kernel, int p, double s);

struct BiasOracleResult {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  double bias = 0.0;
  double quadrature_error = 0.0;
};

/// e1' A(s)^-1 B(s). Throws Degenerate if A(s) is singular.
double unit_bias(const KernelSpec& kernel, int p, double s);

/// Population bias of the treated-side fit at (s, 0) with bandwidth h, from
/// h-scaled integrals in original units (the scaling identity is not used).
BiasOracleResult fixed_h_bias(const KernelSpec& kernel, int p, double h, double s);

/// mu_t(x) = b0 + b1 x1 + b2 x2 per side.
struct LinearDgp {
  std::array<double, 3> beta0{};
  std::array<double, 3> beta1{};

  double mu(Side side, const PointXY& x) const noexcept;
};

double population_tau(const LinearDgp& dgp, const PointXY& x) noexcept;

}  // namespace bdd
