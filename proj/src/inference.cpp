#include "bdd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdd/error.hpp"
#include "bdd/parallel.hpp"
#include "bdd/random.hpp"

namespace bdd {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidInput, "probability must lie in (0, 1)", p);
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
               45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
               21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

IntervalResult make_interval(const PointXY& eval_pt, double theta_hat, double se, double alpha, double q) {
  IntervalResult out;
  out.eval_pt = eval_pt;
  out.theta_hat = theta_hat;
  out.se = se;
  out.alpha = alpha;
  out.q = q;
  out.lower = theta_hat - q * se;
  out.upper = theta_hat + q * se;
  return out;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidLevel, "alpha must lie in (0, 1)", alpha);
}

double checked_se(const PointFit& fit) {
  if (!fit.xi_hat || !(*fit.xi_hat > 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "variance estimate missing or not positive",
                fit.xi_hat.value_or(0.0));
  }
  return std::sqrt(*fit.xi_hat);
}

}  // namespace

IntervalResult pointwise_ci(const PointFit& fit, double alpha) {
  check_alpha(alpha);
  return make_interval(fit.eval_pt, fit.theta_hat, checked_se(fit), alpha, normal_quantile(1.0 - alpha / 2.0));
}

Eigen::MatrixXd correlation_sqrt_factor(const Eigen::MatrixXd& corr) {
  if (corr.rows() == 0 || corr.rows() != corr.cols()) {
    throw Error(ErrorCode::ContractViolation, "correlation matrix must be square and nonempty");
  }
  if (!corr.isApprox(corr.transpose(), 1e-10) && (corr - corr.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::ContractViolation, "correlation matrix is not symmetric");
  }
  for (Eigen::Index k = 0; k < corr.rows(); ++k) {
    if (std::abs(corr(k, k) - 1.0) > 1e-8) {
      throw Error(ErrorCode::ContractViolation, "correlation matrix diagonal is not 1");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  Eigen::VectorXd lambda = es.eigenvalues();
  if (lambda(0) < -1e-8) {
    throw Error(ErrorCode::ContractViolation, "correlation matrix is not positive semidefinite; regularize first",
                lambda(0));
  }
  lambda = lambda.cwiseMax(0.0);
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

double uniform_quantile_from_factor(const Eigen::MatrixXd& factor, double alpha, std::size_t num_draws,
                                    std::uint64_t seed) {
  check_alpha(alpha);
  if (num_draws == 0) throw Error(ErrorCode::InvalidInput, "num_draws must be positive");
  const Eigen::Index m = factor.rows();
  const Eigen::Index k = factor.cols();
  std::vector<double> maxima(num_draws);
  parallel_for(num_draws, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd z(k);
    Eigen::VectorXd x(m);
    for (std::size_t j = begin; j < end; ++j) {
      CounterRng rng(seed, j);
      for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
      x.noalias() = factor * z;
      maxima[j] = x.cwiseAbs().maxCoeff();
    }
  });
  // ceil((1 - alpha) N), guarded against representation error in the product.
  const double target = (1.0 - alpha) * static_cast<double>(num_draws);
  auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  rank = std::clamp<std::size_t>(rank, 1, num_draws);
  auto nth = maxima.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(maxima.begin(), nth, maxima.end());
  return *nth;
}

double uniform_quantile(const Eigen::MatrixXd& corr, double alpha, std::size_t num_draws, std::uint64_t seed) {
  return uniform_quantile_from_factor(correlation_sqrt_factor(corr), alpha, num_draws, seed);
}

void attach_variances(std::span<PointFit> fits, const CovarianceSurface& surface) {
  if (fits.size() != surface.size()) throw Error(ErrorCode::InvalidInput, "fit/surface size mismatch");
  for (std::size_t k = 0; k < fits.size(); ++k) {
    fits[k].xi_hat = surface.xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  }
}

BandResult uniform_band(std::span<const PointFit> fits, const CovarianceSurface& surface, double alpha,
                        std::size_t num_draws, std::uint64_t seed) {
  check_alpha(alpha);
  if (fits.size() != surface.size()) throw Error(ErrorCode::InvalidInput, "fit/surface size mismatch");
  BandResult band;
  band.num_draws = num_draws;
  band.seed = seed;
  band.q = uniform_quantile_from_factor(surface.sqrt_factor, alpha, num_draws, seed);
  band.intervals.reserve(fits.size());
  for (const auto& f : fits) {
    band.intervals.push_back(make_interval(f.eval_pt, f.theta_hat, checked_se(f), alpha, band.q));
  }
  return band;
}

std::optional<std::string> perimeter_warning(const BoundaryPolyline& polyline, const PointXY& eval_pt, double h,
                                             double multiple) {
  const double len = polyline.length_within(eval_pt, h);
  if (len <= multiple * h) return std::nullopt;
  std::ostringstream os;
  os << "boundary length " << len << " inside the kernel support at (" << eval_pt.x1 << ", " << eval_pt.x2
     << ") exceeds " << multiple << " * h; uniform band may be unreliable";
  return os.str();
}

}  // namespace bdd
