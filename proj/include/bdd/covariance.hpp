#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bdd/locpoly.hpp"

namespace bdd {

/// Which side indicators enter the cross-point residual moment. For
/// evaluation points on the boundary the two coincide.
enum class IndicatorMode { Both, FirstOnly };

/// Upsilon_hat_{t,x1,x2} = h^2 E_n[ r_p(D(x1)/h) K_h(D(x1)) e(x1) 1_t(x1)
///                                   r_p(D(x2)/h)' K_h(D(x2)) e(x2) 1_t(x2) ].
/// Both fits must share sample, kernel, order and bandwidth (InvalidPairing otherwise).
Eigen::MatrixXd upsilon(const PointFit& f1, const PointFit& f2, Side side,
                        IndicatorMode mode = IndicatorMode::Both);

/// Xi_hat_{t,x1,x2}. Fits may use different bandwidths: the h^2 factors of
/// the common-bandwidth formula are replaced by h1*h2, which reduces to it exactly.
double xi_side(const PointFit& f1, const PointFit& f2, Side side,
               IndicatorMode mode = IndicatorMode::Both);

/// Xi_hat_{x1,x2} = Xi_hat_0 + Xi_hat_1.
double xi_pair(const PointFit& f1, const PointFit& f2);

struct CovarianceSurface {
  std::vector<PointXY> points;
  Eigen::MatrixXd xi;
  Eigen::MatrixXd corr;         ///< regularized correlation
  Eigen::MatrixXd sqrt_factor;  ///< L with L L' == corr
  bool regularization_applied = false;
  double eig_floor = 1e-10;
  double min_raw_eigenvalue = 0.0;  ///< smallest eigenvalue before clipping

  std::size_t size() const noexcept { return points.size(); }
};

/// Pairwise Xi_hat over the fits, its correlation, eigenvalue clipping at
/// `eig_floor` and diagonal renormalization. Throws DegenerateVariance if a
/// diagonal entry is not strictly positive.
CovarianceSurface build_surface(std::span<const PointFit> fits, double eig_floor = 1e-10);

}  // namespace bdd
