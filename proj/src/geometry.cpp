#include "bdd/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bdd/error.hpp"

namespace bdd {

bool is_finite(const PointXY& p) noexcept { return std::isfinite(p.x1) && std::isfinite(p.x2); }

namespace {

double euclid(const PointXY& a, const PointXY& b) { return std::hypot(a.x1 - b.x1, a.x2 - b.x2); }

std::vector<PointXY> probe_points() {
  // Fixed spread of points at several scales; deterministic so registration is reproducible.
  std::vector<PointXY> pts = {{0, 0}, {1, 0}, {0, 1}, {-1, -1}, {3, 4}, {-2.5, 0.5},
                              {10, -7}, {0.001, 0.002}, {-50, 25}, {7.25, 7.25}};
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < 14; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double v = static_cast<double>(state >> 11) * 0x1.0p-53;
    pts.push_back({200.0 * u - 100.0, 200.0 * v - 100.0});
  }
  return pts;
}

}  // namespace

DistanceMetric DistanceMetric::euclidean() { return DistanceMetric("euclidean", euclid, true); }

DistanceMetric DistanceMetric::custom(std::string name, Fn fn) {
  if (!fn) throw Error(ErrorCode::InvalidInput, "metric '" + name + "' has no function");
  const auto pts = probe_points();
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidInput, "metric '" + name + "' rejected: " + why);
  };
  for (const auto& a : pts) {
    const double self = fn(a, a);
    if (!(std::abs(self) <= 1e-12)) fail("d(a,a) != 0");
    for (const auto& b : pts) {
      const double ab = fn(a, b);
      const double ba = fn(b, a);
      if (!std::isfinite(ab) || ab < 0.0) fail("negative or non-finite value");
      if (!(a == b) && ab <= 0.0) fail("d(a,b) == 0 for a != b");
      if (std::abs(ab - ba) > 1e-12 * std::max(1.0, ab)) fail("not symmetric");
      for (const auto& c : pts) {
        const double ac = fn(a, c);
        const double bc = fn(b, c);
        if (ac > ab + bc + 1e-12 * std::max(1.0, ac)) fail("triangle inequality violated");
      }
    }
  }
  return DistanceMetric(std::move(name), std::move(fn), false);
}

double DistanceMetric::operator()(const PointXY& a, const PointXY& b) const { return fn_(a, b); }

double distance(const PointXY& a, const PointXY& b, const DistanceMetric& metric) {
  if (!is_finite(a) || !is_finite(b)) throw Error(ErrorCode::InvalidInput, "non-finite coordinate");
  return metric(a, b);
}

double point_segment_distance(const PointXY& p, const PointXY& a, const PointXY& b) noexcept {
  const double dx = b.x1 - a.x1;
  const double dy = b.x2 - a.x2;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x1 - a.x1) * dx + (p.x2 - a.x2) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x1 - (a.x1 + t * dx), p.x2 - (a.x2 + t * dy));
}

// ---------------------------------------------------------------------------
// BoundaryPolyline

BoundaryPolyline::BoundaryPolyline(std::vector<PointXY> vertices) : vertices_(std::move(vertices)) {
  init();
  kinks_ = detect_kinks(vertices_);
}

BoundaryPolyline::BoundaryPolyline(std::vector<PointXY> vertices, std::set<std::size_t> kinks)
    : vertices_(std::move(vertices)), kinks_(std::move(kinks)) {
  init();
  for (std::size_t k : kinks_) {
    if (k == 0 || k + 1 >= vertices_.size()) {
      throw Error(ErrorCode::InvalidInput,
                  "kink index " + std::to_string(k) + " is not an interior vertex");
    }
  }
}

void BoundaryPolyline::init() {
  if (vertices_.size() < 2) throw Error(ErrorCode::InvalidInput, "polyline needs at least 2 vertices");
  cumulative_.assign(vertices_.size(), 0.0);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!is_finite(vertices_[i])) throw Error(ErrorCode::InvalidInput, "non-finite polyline vertex");
    if (i == 0) continue;
    const double seg = euclid(vertices_[i - 1], vertices_[i]);
    if (!(seg > 0.0)) {
      throw Error(ErrorCode::InvalidInput,
                  "consecutive polyline vertices " + std::to_string(i - 1) + " and " +
                      std::to_string(i) + " coincide");
    }
    cumulative_[i] = cumulative_[i - 1] + seg;
  }
  if (!std::isfinite(length()) || !(length() > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "polyline length must be finite and positive");
  }
}

std::vector<PointXY> BoundaryPolyline::kink_points() const {
  std::vector<PointXY> out;
  out.reserve(kinks_.size());
  for (std::size_t k : kinks_) out.push_back(vertices_[k]);
  return out;
}

PointXY BoundaryPolyline::point_at(double s) const {
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t seg = it == cumulative_.end() ? segment_count() - 1
                                            : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  seg = std::min(seg, segment_count() - 1);
  const PointXY& a = vertices_[seg];
  const PointXY& b = vertices_[seg + 1];
  const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
  const double t = std::clamp((s - cumulative_[seg]) / seg_len, 0.0, 1.0);
  if (t == 1.0) return b;
  return {a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2)};
}

double BoundaryPolyline::distance_to(const PointXY& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[i + 1]));
  }
  return best;
}

double BoundaryPolyline::length_within(const PointXY& center, double radius) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const PointXY& a = vertices_[i];
    const PointXY& b = vertices_[i + 1];
    const double dx = b.x1 - a.x1;
    const double dy = b.x2 - a.x2;
    const double fx = a.x1 - center.x1;
    const double fy = a.x2 - center.x2;
    // |f + t d|^2 <= r^2  <=>  qa t^2 + qb t + qc <= 0
    const double qa = dx * dx + dy * dy;
    const double qb = 2.0 * (fx * dx + fy * dy);
    const double qc = fx * fx + fy * fy - radius * radius;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-qb - sq) / (2.0 * qa));
    const double t1 = std::min(1.0, (-qb + sq) / (2.0 * qa));
    if (t1 > t0) total += (t1 - t0) * std::sqrt(qa);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Assignment

AssignmentRule::AssignmentRule(PolygonRule rule) {
  if (rule.vertices.size() < 3) throw Error(ErrorCode::InvalidInput, "polygon needs at least 3 vertices");
  for (const auto& v : rule.vertices) {
    if (!is_finite(v)) throw Error(ErrorCode::InvalidInput, "non-finite polygon vertex");
  }
  rule_ = std::move(rule);
}

namespace {

bool polygon_contains(const std::vector<PointXY>& poly, const PointXY& p) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= PolygonRule::kEdgeTolerance) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const PointXY& a = poly[i];
    const PointXY& b = poly[j];
    if ((a.x2 > p.x2) != (b.x2 > p.x2)) {
      const double xcross = (b.x1 - a.x1) * (p.x2 - a.x2) / (b.x2 - a.x2) + a.x1;
      if (p.x1 < xcross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool AssignmentRule::treated(const PointXY& p) const {
  if (!is_finite(p)) throw Error(ErrorCode::InvalidInput, "non-finite point in membership test");
  if (const auto* q = std::get_if<QuadrantRule>(&rule_)) {
    const bool ok1 = q->x1_positive ? p.x1 >= 0.0 : p.x1 <= 0.0;
    const bool ok2 = q->x2_positive ? p.x2 >= 0.0 : p.x2 <= 0.0;
    return ok1 && ok2;
  }
  return polygon_contains(std::get<PolygonRule>(rule_).vertices, p);
}

double signed_distance(const PointXY& x, const PointXY& eval_pt, const AssignmentRule& rule,
                       const DistanceMetric& metric) {
  const double d = distance(x, eval_pt, metric);
  return rule.treated(x) ? d : -d;
}

// ---------------------------------------------------------------------------
// Grid and kinks

EvalGrid make_grid(const BoundaryPolyline& polyline, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidInput, "grid size must be positive");
  EvalGrid grid;
  grid.points.reserve(m);
  grid.arclengths.reserve(m);
  const double len = polyline.length();
  for (std::size_t k = 0; k < m; ++k) {
    const double s = m == 1 ? 0.5 * len
                            : (k + 1 == m ? len : len * static_cast<double>(k) / static_cast<double>(m - 1));
    grid.arclengths.push_back(s);
    grid.points.push_back(polyline.point_at(s));
  }
  return grid;
}

std::set<std::size_t> detect_kinks(const std::vector<PointXY>& vertices, double angle_tol) {
  if (!(angle_tol > 0.0 && angle_tol < std::numbers::pi / 2)) {
    throw Error(ErrorCode::InvalidInput, "kink angle tolerance must lie in (0, pi/2)");
  }
  std::set<std::size_t> out;
  for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
    const double ux = vertices[i].x1 - vertices[i - 1].x1;
    const double uy = vertices[i].x2 - vertices[i - 1].x2;
    const double vx = vertices[i + 1].x1 - vertices[i].x1;
    const double vy = vertices[i + 1].x2 - vertices[i].x2;
    const double turn = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    if (std::abs(turn) > angle_tol) out.insert(i);
  }
  return out;
}

}  // namespace bdd
