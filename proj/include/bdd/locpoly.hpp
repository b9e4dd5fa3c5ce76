#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bdd/geometry.hpp"
#include "bdd/kernel.hpp"
#include "bdd/sample.hpp"

namespace bdd {

/// Smallest admissible Gram eigenvalue; below it a side fit is rejected.
inline constexpr double kMinGramEigenvalue = 1e-10;

/// r_p(u) = (1, u, ..., u^p).
Eigen::VectorXd poly_basis(double u, int p);

struct GramMatrix {
  Eigen::MatrixXd entries;
  double min_eigenvalue = 0.0;
};

/// One observation that carries positive kernel weight on the fitted side.
struct LocalObs {
  std::size_t index = 0;
  double u = 0.0;         ///< D_i / h
  double weight = 0.0;    ///< K_h(D_i)
  double residual = 0.0;  ///< Y_i - r_p(u)' gamma_hat
};

struct SideFit {
  Side side = Side::Control;
  Eigen::VectorXd gamma_hat;  ///< coefficients of r_p(D/h)
  double intercept = 0.0;
  std::size_t n_eff = 0;
  GramMatrix gram;
  std::vector<LocalObs> local;  ///< sorted by index
};

struct PointFit {
  PointXY eval_pt;
  double h = 0.0;
  int p = 1;
  KernelSpec kernel;
  std::shared_ptr<const Sample> sample;
  DistanceColumn column;
  SideFit fit0;
  SideFit fit1;
  double theta_hat = 0.0;
  std::optional<double> xi_hat;

  const SideFit& side_fit(Side s) const noexcept { return s == Side::Treated ? fit1 : fit0; }
};

/// Psi_hat_{t,x}: n^-1 sum r_p(D/h) r_p(D/h)' K_h(D) 1(side t), averaged over the full sample.
GramMatrix gram(const DistanceColumn& column, Side side, const KernelSpec& kernel, double h, int p);

/// Weighted least squares on one side in the scaled basis.
/// Throws InsufficientData when fewer than p+1 observations carry weight and
/// SingularGram (payload: eigenvalue) when the Gram is numerically singular.
SideFit fit_side(std::span<const double> y, const DistanceColumn& column, Side side,
                 const KernelSpec& kernel, double h, int p);

PointFit fit_point(std::shared_ptr<const Sample> sample, DistanceColumn column,
                   const KernelSpec& kernel, double h, int p);

PointFit fit_point(std::shared_ptr<const Sample> sample, const PointXY& eval_pt,
                   const AssignmentRule& rule, const DistanceMetric& metric,
                   const KernelSpec& kernel, double h, int p);

}  // namespace bdd
