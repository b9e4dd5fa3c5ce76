#include "bdd/locpoly.hpp"

#include <cmath>
#include <string>

#include "bdd/error.hpp"

namespace bdd {

Eigen::VectorXd poly_basis(double u, int p) {
  Eigen::VectorXd r(p + 1);
  double v = 1.0;
  for (int j = 0; j <= p; ++j) {
    r(j) = v;
    v *= u;
  }
  return r;
}

namespace {

void check_args(double h, int p) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive and finite", h);
  }
  if (p < 0) throw Error(ErrorCode::InvalidInput, "polynomial order must be nonnegative");
}

// Accumulates the Gram matrix (and optionally S) over side-t observations with positive weight.
struct Moments {
  Eigen::MatrixXd psi;
  Eigen::VectorXd s;
  std::vector<LocalObs> local;
};

Moments accumulate(std::span<const double> y, const DistanceColumn& column, Side side,
                   const KernelSpec& kernel, double h, int p) {
  const std::size_t n = column.size();
  Moments m;
  m.psi = Eigen::MatrixXd::Zero(p + 1, p + 1);
  m.s = Eigen::VectorXd::Zero(p + 1);
  const bool with_y = !y.empty();
  // power sums sum_i w u^k, k = 0..2p
  Eigen::VectorXd pow_sums = Eigen::VectorXd::Zero(2 * p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (column.side[i] != side) continue;
    const double w = kh_weight(kernel, column.values[i], h);
    if (w == 0.0) continue;
    const double u = column.values[i] / h;
    double v = w;
    for (int k = 0; k <= 2 * p; ++k) {
      pow_sums(k) += v;
      if (with_y && k <= p) m.s(k) += v * y[i];
      v *= u;
    }
    m.local.push_back({i, u, w, 0.0});
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j <= p; ++j) {
    for (int k = 0; k <= p; ++k) m.psi(j, k) = pow_sums(j + k) * inv_n;
  }
  m.s *= inv_n;
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::string side_label(Side s) { return s == Side::Treated ? "treated side" : "control side"; }

}  // namespace

GramMatrix gram(const DistanceColumn& column, Side side, const KernelSpec& kernel, double h, int p) {
  check_args(h, p);
  auto m = accumulate({}, column, side, kernel, h, p);
  return {m.psi, min_eigenvalue(m.psi)};
}

SideFit fit_side(std::span<const double> y, const DistanceColumn& column, Side side,
                 const KernelSpec& kernel, double h, int p) {
  check_args(h, p);
  if (y.size() != column.size()) throw Error(ErrorCode::InvalidInput, "outcome/column length mismatch");
  auto m = accumulate(y, column, side, kernel, h, p);

  SideFit fit;
  fit.side = side;
  fit.n_eff = m.local.size();
  if (fit.n_eff < static_cast<std::size_t>(p + 1)) {
    throw Error(ErrorCode::InsufficientData,
                side_label(side) + ": " + std::to_string(fit.n_eff) +
                    " weighted observations, need at least " + std::to_string(p + 1),
                static_cast<double>(fit.n_eff));
  }
  fit.gram = {m.psi, min_eigenvalue(m.psi)};
  if (!(fit.gram.min_eigenvalue >= kMinGramEigenvalue)) {
    throw Error(ErrorCode::SingularGram,
                side_label(side) + ": Gram minimum eigenvalue " +
                    std::to_string(fit.gram.min_eigenvalue) + " below threshold",
                fit.gram.min_eigenvalue);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.psi);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularGram, side_label(side) + ": Cholesky factorization failed",
                fit.gram.min_eigenvalue);
  }
  fit.gamma_hat = llt.solve(m.s);
  fit.intercept = fit.gamma_hat(0);
  for (auto& obs : m.local) {
    double fitted = 0.0;
    double v = 1.0;
    for (int j = 0; j <= p; ++j) {
      fitted += fit.gamma_hat(j) * v;
      v *= obs.u;
    }
    obs.residual = y[obs.index] - fitted;
  }
  fit.local = std::move(m.local);
  return fit;
}

PointFit fit_point(std::shared_ptr<const Sample> sample, DistanceColumn column,
                   const KernelSpec& kernel, double h, int p) {
  if (!sample) throw Error(ErrorCode::InvalidInput, "null sample");
  PointFit out;
  out.eval_pt = column.eval_pt;
  out.h = h;
  out.p = p;
  out.kernel = kernel;
  out.fit0 = fit_side(sample->y, column, Side::Control, kernel, h, p);
  out.fit1 = fit_side(sample->y, column, Side::Treated, kernel, h, p);
  out.theta_hat = out.fit1.intercept - out.fit0.intercept;
  out.column = std::move(column);
  out.sample = std::move(sample);
  return out;
}

PointFit fit_point(std::shared_ptr<const Sample> sample, const PointXY& eval_pt,
                   const AssignmentRule& rule, const DistanceMetric& metric,
                   const KernelSpec& kernel, double h, int p) {
  if (!sample) throw Error(ErrorCode::InvalidInput, "null sample");
  auto column = build_distance_column(*sample, eval_pt, rule, metric);
  return fit_point(std::move(sample), std::move(column), kernel, h, p);
}

}  // namespace bdd
