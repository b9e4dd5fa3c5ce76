#include "bdd/covariance.hpp"

#include <cmath>

#include "bdd/error.hpp"
#include "bdd/parallel.hpp"

namespace bdd {

namespace {

void check_pairing(const PointFit& f1, const PointFit& f2) {
  if (!f1.sample || f1.sample != f2.sample) {
    throw Error(ErrorCode::InvalidPairing, "fits are not built on the same sample");
  }
  if (!(f1.kernel == f2.kernel) || f1.p != f2.p) {
    throw Error(ErrorCode::InvalidPairing, "fits use different kernels or polynomial orders");
  }
}

// n^-1 sum_i r_p(u1) r_p(u2)' w1 w2 e1 e2 over the selected observations (no h factors).
Eigen::MatrixXd cross_moment(const PointFit& f1, const PointFit& f2, Side side, IndicatorMode mode) {
  const int p = f1.p;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p + 1, p + 1);
  const auto& a = f1.side_fit(side).local;
  const auto add = [&](const LocalObs& o1, double u2, double w2, double e2) {
    const double s = o1.weight * o1.residual * w2 * e2;
    if (s == 0.0) return;
    out.noalias() += s * poly_basis(o1.u, p) * poly_basis(u2, p).transpose();
  };

  if (mode == IndicatorMode::Both) {
    const auto& b = f2.side_fit(side).local;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].index < b[j].index) {
        ++i;
      } else if (b[j].index < a[i].index) {
        ++j;
      } else {
        add(a[i], b[j].u, b[j].weight, b[j].residual);
        ++i;
        ++j;
      }
    }
  } else {
    const auto& gamma2 = f2.side_fit(side).gamma_hat;
    const auto& y = f2.sample->y;
    for (const auto& o1 : a) {
      const double d2 = f2.column.values[o1.index];
      const double w2 = kh_weight(f2.kernel, d2, f2.h);
      if (w2 == 0.0) continue;
      const double u2 = d2 / f2.h;
      const double e2 = y[o1.index] - poly_basis(u2, p).dot(gamma2);
      add(o1, u2, w2, e2);
    }
  }
  return out / static_cast<double>(f1.sample->size());
}

Eigen::VectorXd psi_inv_e1(const SideFit& fit) {
  const auto dim = fit.gram.entries.rows();
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(dim, 0);
  Eigen::LLT<Eigen::MatrixXd> llt(fit.gram.entries);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularGram, "Gram factorization failed", fit.gram.min_eigenvalue);
  }
  return llt.solve(e1);
}

}  // namespace

Eigen::MatrixXd upsilon(const PointFit& f1, const PointFit& f2, Side side, IndicatorMode mode) {
  check_pairing(f1, f2);
  if (f1.h != f2.h) throw Error(ErrorCode::InvalidPairing, "fits use different bandwidths");
  return f1.h * f1.h * cross_moment(f1, f2, side, mode);
}

double xi_side(const PointFit& f1, const PointFit& f2, Side side, IndicatorMode mode) {
  check_pairing(f1, f2);
  const Eigen::MatrixXd m = cross_moment(f1, f2, side, mode);
  if (m.isZero(0.0)) return 0.0;
  const auto v1 = psi_inv_e1(f1.side_fit(side));
  const auto v2 = psi_inv_e1(f2.side_fit(side));
  return v1.dot(m * v2) / static_cast<double>(f1.sample->size());
}

double xi_pair(const PointFit& f1, const PointFit& f2) {
  return xi_side(f1, f2, Side::Control) + xi_side(f1, f2, Side::Treated);
}

CovarianceSurface build_surface(std::span<const PointFit> fits, double eig_floor) {
  const auto m = static_cast<Eigen::Index>(fits.size());
  if (m == 0) throw Error(ErrorCode::InvalidInput, "no fits for covariance surface");
  if (!(eig_floor >= 0.0)) throw Error(ErrorCode::InvalidInput, "eigenvalue floor must be nonnegative");

  CovarianceSurface out;
  out.eig_floor = eig_floor;
  for (const auto& f : fits) out.points.push_back(f.eval_pt);
  out.xi = Eigen::MatrixXd::Zero(m, m);

  // Upper triangle, one row per task.
  parallel_for(fits.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t l = k; l < fits.size(); ++l) {
        out.xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = xi_pair(fits[k], fits[l]);
      }
    }
  });
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < k; ++l) out.xi(k, l) = out.xi(l, k);
  }

  Eigen::VectorXd inv_sd(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double v = out.xi(k, k);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::DegenerateVariance,
                  "non-positive variance at grid point " + std::to_string(k + 1), v);
    }
    inv_sd(k) = 1.0 / std::sqrt(v);
  }
  const Eigen::MatrixXd raw = inv_sd.asDiagonal() * out.xi * inv_sd.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(raw);
  Eigen::VectorXd lambda = es.eigenvalues();
  out.min_raw_eigenvalue = lambda(0);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (lambda(k) < eig_floor) {
      lambda(k) = eig_floor;
      out.regularization_applied = true;
    }
  }
  Eigen::MatrixXd factor = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  // Renormalize so the implied correlation has a unit diagonal.
  for (Eigen::Index k = 0; k < m; ++k) {
    const double norm = factor.row(k).norm();
    if (norm > 0.0) factor.row(k) /= norm;
  }
  out.sqrt_factor = factor;
  out.corr = factor * factor.transpose();
  for (Eigen::Index k = 0; k < m; ++k) out.corr(k, k) = 1.0;
  out.corr = 0.5 * (out.corr + out.corr.transpose()).eval();
  return out;
}

}  // namespace bdd
