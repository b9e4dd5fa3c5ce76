#include "bdd/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdd/covariance.hpp"
#include "bdd/error.hpp"
#include "bdd/locpoly.hpp"

namespace bdd {

double boundary_scale(const Sample& sample, const BoundaryPolyline& polyline) {
  const std::size_t n = sample.size();
  if (n < 2) throw Error(ErrorCode::InvalidData, "rule-of-thumb bandwidth needs at least 2 observations");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = polyline.distance_to(sample.x[i]);
    const double delta = d - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (d - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::InvalidData, "distance-to-boundary has zero spread", sd);
  return sd;
}

double rot_from_scale(double scale, double c0, double n, double exponent) {
  if (!(scale > 0.0) || !(c0 > 0.0) || !(n >= 1.0) || !std::isfinite(exponent)) {
    throw Error(ErrorCode::InvalidInput, "rule-of-thumb inputs must be positive");
  }
  return c0 * scale * std::pow(n, -exponent);
}

double rot_bandwidth(const Sample& sample, const BoundaryPolyline& polyline, double c0, double exponent) {
  return rot_from_scale(boundary_scale(sample, polyline), c0, static_cast<double>(sample.size()), exponent);
}

double data_diameter(const Sample& sample) {
  std::vector<PointXY> pts = sample.x;
  std::sort(pts.begin(), pts.end(), [](const PointXY& a, const PointXY& b) {
    return a.x1 < b.x1 || (a.x1 == b.x1 && a.x2 < b.x2);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return 0.0;
  const auto cross = [](const PointXY& o, const PointXY& a, const PointXY& b) {
    return (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1);
  };
  // Andrew's monotone chain.
  std::vector<PointXY> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, distance(hull[i], hull[j]));
  }
  if (hull.size() < 2) best = distance(pts.front(), pts.back());
  return best;
}

std::vector<double> default_candidate_grid(const DistanceColumn& column, double diameter, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::InvalidInput, "candidate grid needs at least 2 points");
  std::vector<double> abs_d;
  abs_d.reserve(column.size());
  for (double d : column.values) {
    if (d != 0.0) abs_d.push_back(std::abs(d));
  }
  if (abs_d.empty() || !(diameter > 0.0)) {
    throw Error(ErrorCode::BandwidthSelectionFailed, "no nonzero distances for the candidate grid");
  }
  const auto idx = static_cast<std::size_t>(0.05 * static_cast<double>(abs_d.size() - 1));
  std::nth_element(abs_d.begin(), abs_d.begin() + static_cast<std::ptrdiff_t>(idx), abs_d.end());
  const double lo = abs_d[idx];
  const double hi = 0.5 * diameter;
  if (!(hi > lo)) throw Error(ErrorCode::BandwidthSelectionFailed, "degenerate candidate range", lo);
  std::vector<double> grid(count);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = std::exp(llo + step * static_cast<double>(k));
  grid.back() = hi;
  return grid;
}

double mse_objective(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                     const KernelSpec& kernel, int p, double h) {
  const PointFit lo = fit_point(sample, column, kernel, h, p);
  const PointFit hi = fit_point(sample, column, kernel, h, p + 1);
  const double gap = lo.theta_hat - hi.theta_hat;
  return gap * gap + xi_pair(lo, lo);
}

MsePilotResult mse_pilot(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                         const KernelSpec& kernel, int p, const std::vector<double>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidInput, "empty candidate grid");
  MsePilotResult out;
  out.candidates = candidates;
  out.objective.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    try {
      out.objective[k] = mse_objective(sample, column, kernel, p, candidates[k]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::SingularGram) throw;
      continue;
    }
    const double v = out.objective[k];
    if (v < best || (v == best && candidates[k] > out.h)) {
      best = v;
      out.h = candidates[k];
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::BandwidthSelectionFailed, "no candidate bandwidth produced a valid fit");
  }
  return out;
}

double mse_pilot_bandwidth(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                           const KernelSpec& kernel, int p, const std::vector<double>& candidates) {
  return mse_pilot(sample, column, kernel, p, candidates).h;
}

double kink_adaptive_bandwidth(const PointXY& eval_pt, const BoundaryPolyline& polyline, double h_mse,
                               double floor_h, const DistanceMetric& metric) {
  const auto kinks = polyline.kink_points();
  if (kinks.empty()) return h_mse;
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& k : kinks) nearest = std::min(nearest, metric(eval_pt, k));
  return std::min(h_mse, std::max(floor_h, nearest));
}

double univariate_rescale(double h_1d, int p, double n) {
  if (!(h_1d > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "h_1d must be positive", h_1d);
  if (p < 0 || !(n >= 1.0)) throw Error(ErrorCode::InvalidInput, "invalid order or sample size");
  const double e = 1.0 / static_cast<double>((3 + 2 * p) * (4 + 2 * p));
  return h_1d * std::pow(n, e);
}

BandwidthContext make_bandwidth_context(const BandwidthRule& rule, std::shared_ptr<const Sample> sample,
                                        std::shared_ptr<const BoundaryPolyline> polyline, const KernelSpec& kernel,
                                        int p, const DistanceMetric& metric) {
  if (!sample || !polyline) throw Error(ErrorCode::InvalidInput, "bandwidth context needs a sample and a boundary");
  BandwidthContext ctx{std::move(sample), std::move(polyline), kernel, p, metric, 0.0, 0.0};
  if (std::holds_alternative<FixedBandwidth>(rule)) return ctx;
  ctx.diameter = data_diameter(*ctx.sample);
  if (std::holds_alternative<RuleOfThumb>(rule) || std::holds_alternative<KinkAdaptive>(rule)) {
    ctx.scale = boundary_scale(*ctx.sample, *ctx.polyline);
  }
  return ctx;
}

namespace {

double cap(double h, const BandwidthContext& ctx) { return ctx.diameter > 0.0 ? std::min(h, ctx.diameter) : h; }

double rot_value(const RuleOfThumb& r, const BandwidthContext& ctx) {
  return rot_from_scale(ctx.scale, r.c0, static_cast<double>(ctx.sample->size()), r.exponent);
}

double pilot_value(const MsePilot& m, const BandwidthContext& ctx, const DistanceColumn& column) {
  const auto grid = default_candidate_grid(column, ctx.diameter, m.candidates);
  return mse_pilot_bandwidth(ctx.sample, column, ctx.kernel, ctx.p, grid);
}

}  // namespace

double resolve_bandwidth(const BandwidthRule& rule, const BandwidthContext& ctx, const DistanceColumn& column) {
  if (const auto* f = std::get_if<FixedBandwidth>(&rule)) {
    if (!(f->h > 0.0) || !std::isfinite(f->h)) throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive", f->h);
    return f->h;
  }
  if (const auto* r = std::get_if<RuleOfThumb>(&rule)) return cap(rot_value(*r, ctx), ctx);
  if (const auto* m = std::get_if<MsePilot>(&rule)) return cap(pilot_value(*m, ctx, column), ctx);
  const auto& k = std::get<KinkAdaptive>(rule);
  const double h_mse = pilot_value(k.pilot, ctx, column);
  return cap(kink_adaptive_bandwidth(column.eval_pt, *ctx.polyline, h_mse, rot_value(k.floor, ctx), ctx.metric), ctx);
}

}  // namespace bdd
