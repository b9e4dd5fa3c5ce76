#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdd/bandwidth.hpp"
#include "bdd/covariance.hpp"
#include "bdd/error.hpp"
#include "bdd/format.hpp"
#include "bdd/geometry.hpp"
#include "bdd/inference.hpp"
#include "bdd/kernel.hpp"
#include "bdd/sample.hpp"

namespace bdd {

/// CSV with a header holding y, x1, x2 (any order, extra columns ignored).
/// Missing column -> Schema error naming it; bad cell -> Parse error with its line.
Sample parse_dataset(std::istream& in);
Sample read_dataset(const std::filesystem::path& path);

struct BoundarySpec {
  std::shared_ptr<const BoundaryPolyline> polyline;
  AssignmentRule rule;
};

/// {"vertices": [[x, y], ...], "kinks": [i, ...] (optional),
///  "assignment": {"quadrant": {"x1_sign": "+", "x2_sign": "+"}} or {"polygon": [[x, y], ...]}}
BoundarySpec parse_boundary(const nlohmann::json& doc);
BoundarySpec load_boundary(const std::filesystem::path& path);

struct RunConfig {
  std::string command = "estimate";
  std::filesystem::path data;
  std::filesystem::path boundary;
  std::filesystem::path out;  ///< empty: standard output
  std::filesystem::path dump_cov;
  std::filesystem::path reps_out;
  std::size_t grid = 21;
  int p = 1;
  KernelSpec kernel;
  double alpha = 0.05;
  std::string bw_rule = "rot";
  double h = 0.0;
  double c0 = kDefaultRotMultiplier;
  double bw_exponent = kDefaultRotExponent;
  std::size_t band_draws = kDefaultBandDraws;
  std::uint64_t seed = 1;
  Precision precision = Precision::Human;
  double perimeter_multiple = 20.0;
  std::size_t n = 5000;
  std::size_t reps = 500;
  std::string s_grid = "20";

  BandwidthRule bandwidth_rule() const;
  void validate() const;
};

/// Overwrites fields present in `doc`; keys mirror the long CLI flags with '_'
/// for '-' (e.g. "bw_rule", "band_draws"). Unknown keys -> Schema error.
void apply_config_json(const nlohmann::json& doc, RunConfig& config);
nlohmann::json load_json(const std::filesystem::path& path);

Precision parse_precision(const std::string& name);

struct EstimateRow {
  std::size_t point_id = 0;
  PointXY point;
  double h = std::numeric_limits<double>::quiet_NaN();
  double n_eff0 = std::numeric_limits<double>::quiet_NaN();
  double n_eff1 = std::numeric_limits<double>::quiet_NaN();
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double ci_lower = std::numeric_limits<double>::quiet_NaN();
  double ci_upper = std::numeric_limits<double>::quiet_NaN();
  double band_lower = std::numeric_limits<double>::quiet_NaN();
  double band_upper = std::numeric_limits<double>::quiet_NaN();
  std::optional<ErrorCode> error;
  std::string message;
};

struct EstimateResult {
  std::vector<EstimateRow> rows;
  std::optional<CovarianceSurface> surface;  ///< over the successful points
  std::optional<double> band_q;
  std::vector<std::string> warnings;

  bool any_failed() const noexcept;
};

/// Grid fits, pointwise intervals and the uniform band over every point that
/// could be fitted. Per-point failures become rows carrying an error code.
EstimateResult estimate(std::shared_ptr<const Sample> sample, const BoundarySpec& boundary, const RunConfig& config);

/// point_id,b1,b2,h,n_eff_0,n_eff_1,theta_hat,se,ci_lower,ci_upper,band_lower,band_upper,error
void write_estimate(std::ostream& os, const EstimateResult& result, Precision precision);

/// One row per point: point_id,b1,b2 and the Xi_hat row.
void write_covariance(std::ostream& os, const EstimateResult& result, Precision precision);

/// Reads inputs, writes outputs, returns 0 on success and 2 if any point failed.
int run_estimate(const RunConfig& config, std::ostream& log);

/// Simulation report row as read back from CSV; blank cells become NaN.
struct ReportRow {
  std::string point_id;
  double b1, b2, h, bias, sd, rmse, ec, il;
};

std::vector<ReportRow> read_report(std::istream& in);

}  // namespace bdd
