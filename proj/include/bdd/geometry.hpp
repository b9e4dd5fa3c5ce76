#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace bdd {

/// A location in score space.
struct PointXY {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const PointXY&, const PointXY&) = default;
};

bool is_finite(const PointXY& p) noexcept;

/// Distance function on score space. Euclidean is built in; custom metrics
/// must pass a sampled symmetry / identity / triangle-inequality probe.
class DistanceMetric {
public:
  using Fn = std::function<double(const PointXY&, const PointXY&)>;

  static DistanceMetric euclidean();

  /// Throws InvalidInput if `fn` fails the metric probe.
  static DistanceMetric custom(std::string name, Fn fn);

  double operator()(const PointXY& a, const PointXY& b) const;
  const std::string& name() const noexcept { return name_; }
  bool is_euclidean() const noexcept { return euclidean_; }

private:
  DistanceMetric(std::string name, Fn fn, bool euclidean)
      : name_(std::move(name)), fn_(std::move(fn)), euclidean_(euclidean) {}

  std::string name_;
  Fn fn_;
  bool euclidean_;
};

double distance(const PointXY& a, const PointXY& b,
                const DistanceMetric& metric = DistanceMetric::euclidean());

/// Boundary curve stored as a polyline with explicit kink vertices.
class BoundaryPolyline {
public:
  static constexpr double kDefaultKinkTolerance = 0.05;

  /// Kinks are auto-detected at the default tolerance.
  explicit BoundaryPolyline(std::vector<PointXY> vertices);
  BoundaryPolyline(std::vector<PointXY> vertices, std::set<std::size_t> kinks);

  const std::vector<PointXY>& vertices() const noexcept { return vertices_; }
  const std::set<std::size_t>& kink_indices() const noexcept { return kinks_; }
  const std::vector<double>& cumulative_arclength() const noexcept { return cumulative_; }
  double length() const noexcept { return cumulative_.back(); }
  std::size_t segment_count() const noexcept { return vertices_.size() - 1; }

  std::vector<PointXY> kink_points() const;

  /// Point at arc length `s`, clamped to [0, length()].
  PointXY point_at(double s) const;

  /// Euclidean distance from `p` to the nearest point of the polyline.
  double distance_to(const PointXY& p) const;

  /// Total polyline length inside the closed Euclidean ball around `center`.
  double length_within(const PointXY& center, double radius) const;

private:
  void init();

  std::vector<PointXY> vertices_;
  std::set<std::size_t> kinks_;
  std::vector<double> cumulative_;
};

/// Treatment region is the closed quadrant {s1*x1 >= 0, s2*x2 >= 0}.
struct QuadrantRule {
  bool x1_positive = true;
  bool x2_positive = true;
};

/// Treatment region is the interior of a closed polygon (even-odd), plus all
/// points within `kEdgeTolerance` of an edge.
struct PolygonRule {
  static constexpr double kEdgeTolerance = 1e-12;
  std::vector<PointXY> vertices;
};

class AssignmentRule {
public:
  AssignmentRule() = default;
  AssignmentRule(QuadrantRule rule) : rule_(rule) {}  // NOLINT(google-explicit-constructor)
  AssignmentRule(PolygonRule rule);                   // NOLINT(google-explicit-constructor)

  /// True iff `p` belongs to the treated region (boundary included).
  bool treated(const PointXY& p) const;

  const std::variant<QuadrantRule, PolygonRule>& variant() const noexcept { return rule_; }

private:
  std::variant<QuadrantRule, PolygonRule> rule_ = QuadrantRule{};
};

/// (1(x in A1) - 1(x in A0)) * d(x, eval); a treated point at distance 0 gives +0.
double signed_distance(const PointXY& x, const PointXY& eval_pt, const AssignmentRule& rule,
                       const DistanceMetric& metric = DistanceMetric::euclidean());

struct EvalGrid {
  std::vector<PointXY> points;
  std::vector<double> arclengths;

  std::size_t size() const noexcept { return points.size(); }
};

/// M points at equal arc-length spacing, endpoints included (midpoint if M == 1).
EvalGrid make_grid(const BoundaryPolyline& polyline, std::size_t m);

/// Interior vertices whose absolute turning angle exceeds `angle_tol`.
std::set<std::size_t> detect_kinks(const std::vector<PointXY>& vertices,
                                   double angle_tol = BoundaryPolyline::kDefaultKinkTolerance);

double point_segment_distance(const PointXY& p, const PointXY& a, const PointXY& b) noexcept;

}  // namespace bdd
