#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdd/covariance.hpp"
#include "bdd/locpoly.hpp"

namespace bdd {

inline constexpr std::size_t kDefaultBandDraws = 10000;

double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF (Wichura, AS 241). Throws InvalidInput outside (0, 1).
double normal_quantile(double p);

struct IntervalResult {
  PointXY eval_pt;
  double theta_hat = 0.0;
  double se = 0.0;
  double alpha = 0.05;
  double q = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  double length() const noexcept { return upper - lower; }
  bool covers(double value) const noexcept { return lower <= value && value <= upper; }
};

struct BandResult {
  std::vector<IntervalResult> intervals;
  double q = 0.0;
  std::size_t num_draws = 0;
  std::uint64_t seed = 0;
};

IntervalResult make_interval(const PointXY& eval_pt, double theta_hat, double se, double alpha, double q);

/// theta_hat -/+ Phi^-1(1 - alpha/2) sqrt(Xi_hat_xx). Requires fit.xi_hat > 0.
IntervalResult pointwise_ci(const PointFit& fit, double alpha);

/// Square-root factor L (L L' = corr) from a symmetric eigen decomposition.
/// Throws ContractViolation if corr is not symmetric PSD with unit diagonal.
Eigen::MatrixXd correlation_sqrt_factor(const Eigen::MatrixXd& corr);

/// Empirical (1 - alpha) quantile of max_l |(L z)_l|, z ~ N(0, I), using the
/// ceil((1 - alpha) * num_draws)-th order statistic. Draw j uses its own
/// counter stream, so the result does not depend on the worker count.
double uniform_quantile_from_factor(const Eigen::MatrixXd& factor, double alpha,
                                    std::size_t num_draws, std::uint64_t seed);

double uniform_quantile(const Eigen::MatrixXd& corr, double alpha, std::size_t num_draws,
                        std::uint64_t seed);

/// Uniform band over the fits sharing one simulated critical value.
/// Every fit must carry xi_hat (use attach_variances).
BandResult uniform_band(std::span<const PointFit> fits, const CovarianceSurface& surface, double alpha,
                        std::size_t num_draws, std::uint64_t seed);

/// Copies the surface diagonal into each fit's xi_hat.
void attach_variances(std::span<PointFit> fits, const CovarianceSurface& surface);

/// Warning text when the boundary length inside the kernel support around
/// `eval_pt` exceeds `multiple * h` (local perimeter condition for bands).
std::optional<std::string> perimeter_warning(const BoundaryPolyline& polyline, const PointXY& eval_pt,
                                             double h, double multiple = 20.0);

}  // namespace bdd
