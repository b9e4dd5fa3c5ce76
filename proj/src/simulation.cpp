#include "bdd/simulation.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include "bdd/covariance.hpp"
#include "bdd/error.hpp"
#include "bdd/locpoly.hpp"
#include "bdd/parallel.hpp"
#include "bdd/random.hpp"

namespace bdd {

BoundaryPolyline DgpSpec::boundary() const {
  return BoundaryPolyline({{0.0, boundary_arm}, {0.0, 0.0}, {boundary_arm, 0.0}});
}

void DgpSpec::validate() const {
  if (!(sigma0 >= 0.0) || !(sigma1 >= 0.0)) throw Error(ErrorCode::InvalidInput, "noise SDs must be nonnegative");
  if (!(beta_a > 0.0) || !(beta_b > 0.0)) throw Error(ErrorCode::InvalidInput, "Beta parameters must be positive");
  if (!(score_scale > 0.0) || !std::isfinite(score_shift)) throw Error(ErrorCode::InvalidInput, "bad score transform");
  if (!(boundary_arm > 0.0)) throw Error(ErrorCode::InvalidInput, "boundary arm must be positive", boundary_arm);
}

Sample draw_sample(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw Error(ErrorCode::InvalidInput, "sample size must be at least 1");
  Sample s;
  s.y.resize(n);
  s.x.resize(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const double x1 = spec.score_scale * beta_variate(rng, spec.beta_a, spec.beta_b) + spec.score_shift;
      const double x2 = spec.score_scale * beta_variate(rng, spec.beta_a, spec.beta_b) + spec.score_shift;
      const double e0 = rng.normal();
      const double e1 = rng.normal();
      const PointXY x{x1, x2};
      const Side side = spec.rule.treated(x) ? Side::Treated : Side::Control;
      const double eps = side == Side::Treated ? spec.sigma1 * e1 : spec.sigma0 * e0;
      s.x[i] = x;
      s.y[i] = spec.coef.mu(side, x) + eps;
    }
  });
  return s;
}

EvalGrid mc_grid(const McConfig& config) {
  if (config.points.empty()) return make_grid(config.dgp.boundary(), config.grid_size);
  EvalGrid g;
  g.points = config.points;
  g.arclengths.assign(config.points.size(), std::numeric_limits<double>::quiet_NaN());
  return g;
}

ReplicationRecord run_replication(const McConfig& config, const EvalGrid& grid, std::size_t rep) {
  const std::uint64_t rep_seed = split_seed(config.seed, rep);
  const std::size_t m = grid.size();
  ReplicationRecord rec;
  try {
    auto sample = std::make_shared<const Sample>(draw_sample(config.dgp, config.n, split_seed(rep_seed, 0)));
    auto polyline = std::make_shared<const BoundaryPolyline>(config.dgp.boundary());
    const auto ctx = make_bandwidth_context(config.bandwidth, sample, polyline, config.kernel, config.p);
    std::vector<PointFit> fits;
    fits.reserve(m);
    for (const auto& pt : grid.points) {
      auto column = build_distance_column(*sample, pt, config.dgp.rule);
      const double h = resolve_bandwidth(config.bandwidth, ctx, column);
      fits.push_back(fit_point(sample, std::move(column), config.kernel, h, config.p));
    }
    const auto surface = build_surface(fits, config.eig_floor);
    attach_variances(fits, surface);
    const auto band = uniform_band(fits, surface, config.alpha, config.band_draws, split_seed(rep_seed, 1));

    rec.h.resize(m);
    rec.theta_hat.resize(m);
    rec.se.resize(m);
    rec.covered.resize(m);
    rec.length.resize(m);
    rec.band_q = band.q;
    rec.band_covered = true;
    double band_len = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto ci = pointwise_ci(fits[k], config.alpha);
      const double tau = population_tau(config.dgp.coef, grid.points[k]);
      rec.pointwise_q = ci.q;
      rec.h[k] = fits[k].h;
      rec.theta_hat[k] = fits[k].theta_hat;
      rec.se[k] = ci.se;
      rec.covered[k] = ci.covers(tau);
      rec.length[k] = ci.length();
      rec.band_covered = rec.band_covered && band.intervals[k].covers(tau);
      band_len += band.intervals[k].length();
    }
    rec.band_length = band_len / static_cast<double>(m);
    rec.ok = true;
  } catch (const Error& e) {
    rec = ReplicationRecord{};
    rec.error = e.code();
  }
  return rec;
}

namespace {

// Kahan-compensated running sum.
class KahanSum {
public:
  void add(double v) noexcept {
    const double y = v - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

McReport run_monte_carlo(const McConfig& config) {
  if (config.reps == 0) throw Error(ErrorCode::InvalidInput, "reps must be at least 1");
  if (config.n == 0) throw Error(ErrorCode::InvalidInput, "n must be at least 1");
  config.dgp.validate();
  const EvalGrid grid = mc_grid(config);
  const std::size_t m = grid.size();

  McReport report;
  report.reps = config.reps;
  report.seed = config.seed;
  report.records.resize(config.reps);
  parallel_for(config.reps, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) report.records[r] = run_replication(config, grid, r);
  });

  std::size_t ok = 0;
  for (const auto& rec : report.records) ok += rec.ok ? 1 : 0;
  report.failures = config.reps - ok;
  report.valid = ok > 0 && static_cast<double>(report.failures) <= config.max_failure_rate * static_cast<double>(config.reps);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double R = static_cast<double>(ok);
  report.points.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto& s = report.points[k];
    s.point = grid.points[k];
    s.arclength = grid.arclengths[k];
    s.tau = population_tau(config.dgp.coef, s.point);
    if (ok == 0) {
      s.h = s.bias = s.sd = s.rmse = s.ec = s.il = s.mean_se = nan;
      continue;
    }
    KahanSum theta, hsum, cover, len, se;
    for (const auto& rec : report.records) {
      if (!rec.ok) continue;
      theta.add(rec.theta_hat[k]);
      hsum.add(rec.h[k]);
      cover.add(rec.covered[k] ? 1.0 : 0.0);
      len.add(rec.length[k]);
      se.add(rec.se[k]);
    }
    const double mean = theta.value() / R;
    KahanSum centered, err;
    for (const auto& rec : report.records) {
      if (!rec.ok) continue;
      const double d = rec.theta_hat[k] - mean;
      const double e = rec.theta_hat[k] - s.tau;
      centered.add(d * d);
      err.add(e * e);
    }
    s.h = hsum.value() / R;
    s.bias = mean - s.tau;
    s.sd = std::sqrt(centered.value() / R);
    s.rmse = std::sqrt(err.value() / R);
    s.ec = cover.value() / R;
    s.il = len.value() / R;
    s.mean_se = se.value() / R;
  }
  if (ok == 0) {
    report.uniform_ec = report.uniform_il = nan;
  } else {
    KahanSum cover, len;
    for (const auto& rec : report.records) {
      if (!rec.ok) continue;
      cover.add(rec.band_covered ? 1.0 : 0.0);
      len.add(rec.band_length);
    }
    report.uniform_ec = cover.value() / R;
    report.uniform_il = len.value() / R;
  }
  return report;
}

void write_report(std::ostream& os, const McReport& report, Precision precision) {
  const auto f = [&](double v) { return format_number(v, precision); };
  os << "point_id,b1,b2,h,bias,sd,rmse,ec,il\n";
  for (std::size_t k = 0; k < report.points.size(); ++k) {
    const auto& s = report.points[k];
    os << (k + 1) << ',' << f(s.point.x1) << ',' << f(s.point.x2) << ',' << f(s.h) << ',' << f(s.bias) << ','
       << f(s.sd) << ',' << f(s.rmse) << ',' << f(s.ec) << ',' << f(s.il) << '\n';
  }
  os << "uniform,,,,,,," << f(report.uniform_ec) << ',' << f(report.uniform_il) << '\n';
}

void write_replications(std::ostream& os, const McReport& report, Precision precision) {
  const auto f = [&](double v) { return format_number(v, precision); };
  os << "rep,point_id,h,theta_hat,se,covered,band_q\n";
  for (std::size_t r = 0; r < report.records.size(); ++r) {
    const auto& rec = report.records[r];
    if (!rec.ok) continue;
    for (std::size_t k = 0; k < rec.h.size(); ++k) {
      os << (r + 1) << ',' << (k + 1) << ',' << f(rec.h[k]) << ',' << f(rec.theta_hat[k]) << ',' << f(rec.se[k])
         << ',' << (rec.covered[k] ? 1 : 0) << ',' << f(rec.band_q) << '\n';
    }
  }
}

}  // namespace bdd
