#include "bdd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bdd/error.hpp"
#include "bdd/locpoly.hpp"
#include "bdd/quadrature.hpp"

namespace bdd {

namespace {

constexpr double kPi = std::numbers::pi;

struct Arc {
  double lo;
  double hi;
};

std::vector<Arc> admissible_arcs(const ArcScene& scene, Side side, const ArcOptions& opts) {
  const auto on_side = [&](double theta) {
    const PointXY q{scene.center.x1 + scene.radius * std::cos(theta),
                    scene.center.x2 + scene.radius * std::sin(theta)};
    return scene.rule.treated(q) == (side == Side::Treated);
  };
  const int n = opts.angle_samples;
  const double step = 2.0 * kPi / n;
  std::vector<Arc> arcs;
  bool inside = on_side(0.0);
  double start = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = k * step;
    const double b = (k + 1 == n) ? 2.0 * kPi : (k + 1) * step;
    const bool next = on_side(b);
    if (next == inside) continue;
    // Locate the membership change inside [a, b].
    double lo = a;
    double hi = b;
    while (hi - lo > opts.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (on_side(mid) == inside ? lo : hi) = mid;
    }
    const double cross = 0.5 * (lo + hi);
    if (inside) {
      arcs.push_back({start, cross});
    } else {
      start = cross;
    }
    inside = next;
  }
  if (inside) arcs.push_back({start, 2.0 * kPi});
  return arcs;
}

}  // namespace

double induced_theta(const ArcScene& scene, Side side, const ArcOptions& opts) {
  if (!(scene.radius > 0.0) || !std::isfinite(scene.radius)) {
    throw Error(ErrorCode::InvalidInput, "arc radius must be positive", scene.radius);
  }
  if (!scene.mu || !scene.density) throw Error(ErrorCode::InvalidInput, "arc scene needs mu and density");
  const auto arcs = admissible_arcs(scene, side, opts);
  if (arcs.empty()) throw Error(ErrorCode::NoMass, "no admissible arc on the requested side");

  const auto at = [&](double theta) {
    return PointXY{scene.center.x1 + scene.radius * std::cos(theta),
                   scene.center.x2 + scene.radius * std::sin(theta)};
  };
  QuadratureOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = opts.abs_tol;
  double num = 0.0;
  double den = 0.0;
  for (const auto& arc : arcs) {
    num += integrate([&](double t) { const auto x = at(t); return scene.mu(x) * scene.density(x); }, arc.lo, arc.hi,
                     {}, q)
               .value;
    den += integrate([&](double t) { return scene.density(at(t)); }, arc.lo, arc.hi, {}, q).value;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::NoMass, "admissible arcs carry no density", den);
  return num / den;
}

double corner_theta(double s, double r) {
  if (r <= s) return 2.0 * r / kPi;
  return (r + s) / (kPi - std::acos(s / r));
}

namespace {

// Angular measure of the treated arc at distance u from (s, 0), and the
// integral of sin over it (mu1 = x2 = u sin(theta)).
double arc_width(double s, double u) {
  if (u <= std::abs(s)) return s >= 0.0 ? kPi : 0.0;
  return kPi - std::acos(s / u);
}

double arc_sine(double s, double u) {
  if (u <= std::abs(s)) return s >= 0.0 ? 2.0 : 0.0;
  return 1.0 + s / u;
}

double intercept(const Eigen::MatrixXd& A, const Eigen::VectorXd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues()(0);
  if (!(lambda_min > kMinGramEigenvalue * std::max(1.0, es.eigenvalues()(A.rows() - 1)))) {
    throw Error(ErrorCode::Degenerate, "population Gram matrix is singular", lambda_min);
  }
  return A.ldlt().solve(B)(0);
}

// Integrates the Gram and moment of the corner example with the kernel scaled
// to support radius h. With h = 1 these are A(s), B(s).
BiasOracleResult corner_moments(const KernelSpec& kernel, int p, double h, double s) {
  if (p < 0) throw Error(ErrorCode::InvalidInput, "polynomial order must be nonnegative", p);
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive", h);
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidInput, "s must be finite", s);
  const int k = p + 1;
  const double brk[] = {std::abs(s)};
  QuadratureOptions q;
  q.abs_tol = 1e-15;
  q.rel_tol = 1e-13;

  BiasOracleResult out;
  out.A = Eigen::MatrixXd::Zero(k, k);
  out.B = Eigen::VectorXd::Zero(k);
  const double scale = 1.0 / (h * h);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const auto r = integrate(
          [&](double u) {
            const double v = u / h;
            return arc_width(s, u) * std::pow(v, i + j) * kernel_eval(kernel, v) * scale * u;
          },
          0.0, h, brk, q);
      out.A(i, j) = out.A(j, i) = r.value;
      out.quadrature_error += r.error;
    }
    const auto r = integrate(
        [&](double u) {
          const double v = u / h;
          return arc_sine(s, u) * std::pow(v, i) * kernel_eval(kernel, v) * scale * u * u;
        },
        0.0, h, brk, q);
    out.B(i) = r.value;
    out.quadrature_error += r.error;
  }

  out.bias = intercept(out.A, out.B);
  return out;
}

}  // namespace

BiasFunctionals bias_functionals(const KernelSpec& kernel, int p, double s) {
  if (p < 0) throw Error(ErrorCode::InvalidInput, "polynomial order must be nonnegative", p);
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidInput, "s must be finite", s);
  // Same integrals as corner_moments at h = 1, without requiring A to be invertible.
  const int k = p + 1;
  const double brk[] = {std::abs(s)};
  QuadratureOptions q;
  q.abs_tol = 1e-15;
  q.rel_tol = 1e-13;
  BiasFunctionals out;
  out.A = Eigen::MatrixXd::Zero(k, k);
  out.B = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const auto r = integrate(
          [&](double u) { return arc_width(s, u) * std::pow(u, i + j) * kernel_eval(kernel, u) * u; }, 0.0, 1.0,
          brk, q);
      out.A(i, j) = out.A(j, i) = r.value;
      out.quadrature_error += r.error;
    }
    const auto r = integrate(
        [&](double u) { return arc_sine(s, u) * std::pow(u, i) * kernel_eval(kernel, u) * u * u; }, 0.0, 1.0, brk,
        q);
    out.B(i) = r.value;
    out.quadrature_error += r.error;
  }
  return out;
}

double unit_bias(const KernelSpec& kernel, int p, double s) {
  const auto f = bias_functionals(kernel, p, s);
  return intercept(f.A, f.B);
}

BiasOracleResult fixed_h_bias(const KernelSpec& kernel, int p, double h, double s) {
  return corner_moments(kernel, p, h, s);
}

double LinearDgp::mu(Side side, const PointXY& x) const noexcept {
  const auto& b = side == Side::Treated ? beta1 : beta0;
  return b[0] + b[1] * x.x1 + b[2] * x.x2;
}

double population_tau(const LinearDgp& dgp, const PointXY& x) noexcept {
  return dgp.mu(Side::Treated, x) - dgp.mu(Side::Control, x);
}

}  // namespace bdd
