#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bdd/bandwidth.hpp"
#include "bdd/error.hpp"
#include "bdd/format.hpp"
#include "bdd/geometry.hpp"
#include "bdd/inference.hpp"
#include "bdd/kernel.hpp"
#include "bdd/oracle.hpp"
#include "bdd/sample.hpp"

namespace bdd {

/// Linear potential outcomes with Gaussian noise and independent
/// scale * Beta(a, b) + shift scores. Defaults are the calibrated SPP values.
struct DgpSpec {
  LinearDgp coef{{0.335, 2.52e-3, -1.72e-3}, {0.698, 2.74e-3, -6.05e-4}};
  double sigma0 = 0.332;
  double sigma1 = 0.435;
  double beta_a = 3.0;
  double beta_b = 4.0;
  double score_scale = 100.0;
  double score_shift = -25.0;
  double boundary_arm = 25.0;  ///< arm length of the L-shaped boundary
  AssignmentRule rule = QuadrantRule{};

  /// L-shape (0, arm) -> (0, 0) -> (arm, 0) with its kink at the origin.
  BoundaryPolyline boundary() const;
  void validate() const;
};

/// Observation i draws X1, X2, eps0, eps1 from its own counter stream, so a
/// row depends only on (seed, i). Only the realized side's noise is used.
Sample draw_sample(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

struct McConfig {
  DgpSpec dgp;
  std::size_t n = 5000;
  std::size_t reps = 500;
  std::size_t grid_size = 21;
  std::vector<PointXY> points;  ///< overrides the boundary grid when nonempty
  KernelSpec kernel;
  int p = 1;
  BandwidthRule bandwidth = RuleOfThumb{};
  double alpha = 0.05;
  std::size_t band_draws = kDefaultBandDraws;
  double eig_floor = 1e-10;
  std::uint64_t seed = 1;
  double max_failure_rate = 0.05;
};

struct ReplicationRecord {
  bool ok = false;
  std::optional<ErrorCode> error;
  std::vector<double> h;
  std::vector<double> theta_hat;
  std::vector<double> se;
  std::vector<bool> covered;
  std::vector<double> length;
  double pointwise_q = 0.0;
  double band_q = 0.0;
  bool band_covered = false;
  double band_length = 0.0;  ///< mean band width over the grid
};

struct McPointSummary {
  PointXY point;
  double arclength = 0.0;
  double tau = 0.0;
  double h = 0.0;  ///< mean over successful replications
  double bias = 0.0;
  double sd = 0.0;  ///< 1/R normalization, so rmse^2 = bias^2 + sd^2
  double rmse = 0.0;
  double ec = 0.0;
  double il = 0.0;
  double mean_se = 0.0;
};

struct McReport {
  std::vector<McPointSummary> points;
  double uniform_ec = 0.0;
  double uniform_il = 0.0;
  std::size_t reps = 0;
  std::size_t failures = 0;
  bool valid = true;
  std::uint64_t seed = 0;
  std::vector<ReplicationRecord> records;
};

/// Evaluation points of a run: the explicit list, or the boundary grid.
EvalGrid mc_grid(const McConfig& config);

ReplicationRecord run_replication(const McConfig& config, const EvalGrid& grid, std::size_t rep);

/// Replications run in parallel; aggregation follows replication order, so the
/// report is identical for any worker count.
McReport run_monte_carlo(const McConfig& config);

/// point_id,b1,b2,h,bias,sd,rmse,ec,il rows plus a final "uniform" row.
void write_report(std::ostream& os, const McReport& report, Precision precision = Precision::Human);

/// rep,point_id,h,theta_hat,se,covered,band_q rows for every successful replication.
void write_replications(std::ostream& os, const McReport& report, Precision precision = Precision::Human);

}  // namespace bdd
