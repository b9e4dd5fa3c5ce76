#pragma once

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "bdd/geometry.hpp"
#include "bdd/kernel.hpp"
#include "bdd/sample.hpp"

namespace bdd {

inline constexpr double kDefaultRotMultiplier = 8.0;
inline constexpr double kDefaultRotExponent = 0.25;
inline constexpr std::size_t kDefaultCandidateCount = 15;

/// Scale constant of the rule of thumb: sample SD of the distance from each
/// observation to the boundary. Throws InvalidData if it is zero or n < 2.
double boundary_scale(const Sample& sample, const BoundaryPolyline& polyline);

/// c0 * scale * n^-exponent.
double rot_from_scale(double scale, double c0, double n, double exponent = kDefaultRotExponent);

double rot_bandwidth(const Sample& sample, const BoundaryPolyline& polyline, double c0 = kDefaultRotMultiplier,
                     double exponent = kDefaultRotExponent);

/// Largest pairwise distance between scores (via the convex hull).
double data_diameter(const Sample& sample);

/// `count` log-spaced values from the 5th percentile of nonzero |D| to half the diameter.
std::vector<double> default_candidate_grid(const DistanceColumn& column, double diameter,
                                           std::size_t count = kDefaultCandidateCount);

/// (theta_p - theta_{p+1})^2 + Xi_hat_xx at bandwidth h. Fit failures propagate.
double mse_objective(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                     const KernelSpec& kernel, int p, double h);

struct MsePilotResult {
  double h = 0.0;
  std::vector<double> candidates;
  std::vector<double> objective;  ///< NaN where the candidate could not be fitted
};

/// Minimizes mse_objective over `candidates` (ties go to the larger h).
/// Throws BandwidthSelectionFailed if no candidate can be fitted.
MsePilotResult mse_pilot(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                         const KernelSpec& kernel, int p, const std::vector<double>& candidates);

double mse_pilot_bandwidth(const std::shared_ptr<const Sample>& sample, const DistanceColumn& column,
                           const KernelSpec& kernel, int p, const std::vector<double>& candidates);

/// min{h_mse, max{floor, distance to the nearest kink}}; h_mse if there are no kinks.
double kink_adaptive_bandwidth(const PointXY& eval_pt, const BoundaryPolyline& polyline, double h_mse,
                               double floor_h, const DistanceMetric& metric = DistanceMetric::euclidean());

/// h_1d * n^(1/((3+2p)(4+2p))).
double univariate_rescale(double h_1d, int p, double n);

struct FixedBandwidth {
  double h = 1.0;
};

struct RuleOfThumb {
  double c0 = kDefaultRotMultiplier;
  double exponent = kDefaultRotExponent;
};

struct MsePilot {
  std::size_t candidates = kDefaultCandidateCount;
};

struct KinkAdaptive {
  RuleOfThumb floor;
  MsePilot pilot;
};

using BandwidthRule = std::variant<FixedBandwidth, RuleOfThumb, MsePilot, KinkAdaptive>;

/// Per-sample quantities shared by every evaluation point.
struct BandwidthContext {
  std::shared_ptr<const Sample> sample;
  std::shared_ptr<const BoundaryPolyline> polyline;
  KernelSpec kernel;
  int p = 1;
  DistanceMetric metric = DistanceMetric::euclidean();
  double diameter = 0.0;
  double scale = 0.0;  ///< boundary_scale, or 0 when the rule does not need it
};

BandwidthContext make_bandwidth_context(const BandwidthRule& rule, std::shared_ptr<const Sample> sample,
                                        std::shared_ptr<const BoundaryPolyline> polyline, const KernelSpec& kernel,
                                        int p, const DistanceMetric& metric = DistanceMetric::euclidean());

/// Bandwidth for one evaluation point. Data-driven values are capped at the
/// data diameter; a fixed h is used as given.
double resolve_bandwidth(const BandwidthRule& rule, const BandwidthContext& ctx, const DistanceColumn& column);

}  // namespace bdd
