#include "bdd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bdd/locpoly.hpp"

namespace bdd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Sample parse_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Schema, "empty dataset: missing header");
  const auto header = split_csv(line);
  const auto column = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::Schema, "missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t iy = column("y");
  const std::size_t i1 = column("x1");
  const std::size_t i2 = column("x2");
  const std::size_t width = std::max({iy, i1, i2}) + 1;

  Sample s;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < width) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected at least " +
                                        std::to_string(width) + " fields");
    }
    const auto cell = [&](std::size_t idx, const char* name) {
      const auto v = to_double(cells[idx]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": column '" + name + "' value '" +
                                          std::string(cells[idx]) + "' is not a finite number");
      }
      return *v;
    };
    s.y.push_back(cell(iy, "y"));
    s.x.push_back({cell(i1, "x1"), cell(i2, "x2")});
  }
  if (s.empty()) throw Error(ErrorCode::InvalidData, "dataset has no rows");
  return s;
}

Sample read_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dataset(in);
}

namespace {

PointXY json_point(const nlohmann::json& v, const char* what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorCode::Schema, std::string(what) + " entries must be [x1, x2] number pairs");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<PointXY> json_points(const nlohmann::json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorCode::Schema, std::string(what) + " must be an array");
  std::vector<PointXY> pts;
  for (const auto& e : v) pts.push_back(json_point(e, what));
  return pts;
}

bool sign_positive(const nlohmann::json& q, const char* key) {
  if (!q.contains(key)) return true;
  const auto s = q.at(key).get<std::string>();
  if (s == "+") return true;
  if (s == "-") return false;
  throw Error(ErrorCode::Schema, std::string(key) + " must be \"+\" or \"-\"");
}

}  // namespace

BoundarySpec parse_boundary(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("vertices")) throw Error(ErrorCode::Schema, "boundary needs 'vertices'");
    auto vertices = json_points(doc.at("vertices"), "vertices");
    BoundarySpec spec;
    if (doc.contains("kinks")) {
      std::set<std::size_t> kinks;
      for (const auto& k : doc.at("kinks")) kinks.insert(k.get<std::size_t>());
      spec.polyline = std::make_shared<const BoundaryPolyline>(std::move(vertices), std::move(kinks));
    } else {
      spec.polyline = std::make_shared<const BoundaryPolyline>(std::move(vertices));
    }
    if (!doc.contains("assignment")) throw Error(ErrorCode::Schema, "boundary needs 'assignment'");
    const auto& a = doc.at("assignment");
    if (a.contains("quadrant")) {
      const auto& q = a.at("quadrant");
      spec.rule = QuadrantRule{sign_positive(q, "x1_sign"), sign_positive(q, "x2_sign")};
    } else if (a.contains("polygon")) {
      spec.rule = PolygonRule{json_points(a.at("polygon"), "polygon")};
    } else {
      throw Error(ErrorCode::Schema, "assignment must be 'quadrant' or 'polygon'");
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("boundary file: ") + e.what());
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

BoundarySpec load_boundary(const std::filesystem::path& path) { return parse_boundary(load_json(path)); }

Precision parse_precision(const std::string& name) {
  if (name == "human") return Precision::Human;
  if (name == "full") return Precision::Full;
  throw Error(ErrorCode::InvalidInput, "precision must be 'human' or 'full'");
}

BandwidthRule RunConfig::bandwidth_rule() const {
  const RuleOfThumb rot{c0, bw_exponent};
  if (bw_rule == "fixed") return FixedBandwidth{h};
  if (bw_rule == "rot") return rot;
  if (bw_rule == "mse") return MsePilot{};
  if (bw_rule == "kink") return KinkAdaptive{rot, MsePilot{}};
  throw Error(ErrorCode::InvalidInput, "bw-rule must be one of fixed, rot, mse, kink");
}

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidLevel, "alpha must lie in (0, 1)", alpha);
  if (p < 0 || p > 10) throw Error(ErrorCode::InvalidInput, "p must be in [0, 10]", p);
  if (grid == 0) throw Error(ErrorCode::InvalidInput, "grid must be at least 1");
  if (band_draws < 1) throw Error(ErrorCode::InvalidInput, "band-draws must be positive");
  if (bw_rule == "fixed" && !(h > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "fixed rule needs --h > 0", h);
  if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidInput, "c0 must be positive", c0);
  if (!(perimeter_multiple > 0.0)) throw Error(ErrorCode::InvalidInput, "perimeter multiple must be positive");
  (void)bandwidth_rule();
}

void apply_config_json(const nlohmann::json& doc, RunConfig& c) {
  if (!doc.is_object()) throw Error(ErrorCode::Schema, "config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "data") c.data = v.get<std::string>();
      else if (key == "boundary") c.boundary = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "dump_cov") c.dump_cov = v.get<std::string>();
      else if (key == "reps_out") c.reps_out = v.get<std::string>();
      else if (key == "grid") c.grid = v.get<std::size_t>();
      else if (key == "p") c.p = v.get<int>();
      else if (key == "kernel") c.kernel = parse_kernel(v.get<std::string>());
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "bw_rule") c.bw_rule = v.get<std::string>();
      else if (key == "h") c.h = v.get<double>();
      else if (key == "c0") c.c0 = v.get<double>();
      else if (key == "bw_exponent") c.bw_exponent = v.get<double>();
      else if (key == "band_draws") c.band_draws = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "precision") c.precision = parse_precision(v.get<std::string>());
      else if (key == "perimeter_multiple") c.perimeter_multiple = v.get<double>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "reps") c.reps = v.get<std::size_t>();
      else if (key == "s_grid") c.s_grid = v.is_string() ? v.get<std::string>() : v.dump();
      else throw Error(ErrorCode::Schema, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("config: ") + e.what());
  }
}

bool EstimateResult::any_failed() const noexcept {
  return std::any_of(rows.begin(), rows.end(), [](const EstimateRow& r) { return r.error.has_value(); });
}

EstimateResult estimate(std::shared_ptr<const Sample> sample, const BoundarySpec& boundary, const RunConfig& config) {
  config.validate();
  if (!sample || sample->empty()) throw Error(ErrorCode::InvalidData, "empty sample");
  sample->validate();
  const EvalGrid grid = make_grid(*boundary.polyline, config.grid);
  const BandwidthRule rule = config.bandwidth_rule();
  const auto ctx = make_bandwidth_context(rule, sample, boundary.polyline, config.kernel, config.p);

  EstimateResult result;
  std::vector<PointFit> fits;
  std::vector<std::size_t> fitted_rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EstimateRow row;
    row.point_id = k + 1;
    row.point = grid.points[k];
    try {
      auto column = build_distance_column(*sample, row.point, boundary.rule);
      row.h = resolve_bandwidth(rule, ctx, column);
      auto fit = fit_point(sample, std::move(column), config.kernel, row.h, config.p);
      row.n_eff0 = static_cast<double>(fit.fit0.n_eff);
      row.n_eff1 = static_cast<double>(fit.fit1.n_eff);
      row.theta_hat = fit.theta_hat;
      const double xi = xi_pair(fit, fit);
      if (!(xi > 0.0)) throw Error(ErrorCode::DegenerateVariance, "variance estimate is not positive", xi);
      fit.xi_hat = xi;
      const auto ci = pointwise_ci(fit, config.alpha);
      row.se = ci.se;
      row.ci_lower = ci.lower;
      row.ci_upper = ci.upper;
      if (auto w = perimeter_warning(*boundary.polyline, row.point, row.h, config.perimeter_multiple)) {
        result.warnings.push_back("point " + std::to_string(row.point_id) + ": " + *w);
      }
      fits.push_back(std::move(fit));
      fitted_rows.push_back(k);
    } catch (const Error& e) {
      row.error = e.code();
      row.message = e.what();
    }
    result.rows.push_back(std::move(row));
  }

  if (!fits.empty()) {
    try {
      auto surface = build_surface(fits, 1e-10);
      attach_variances(fits, surface);
      const auto band = uniform_band(fits, surface, config.alpha, config.band_draws, config.seed);
      for (std::size_t j = 0; j < fits.size(); ++j) {
        auto& row = result.rows[fitted_rows[j]];
        row.band_lower = band.intervals[j].lower;
        row.band_upper = band.intervals[j].upper;
      }
      if (surface.regularization_applied) {
        result.warnings.push_back("covariance surface regularized (smallest eigenvalue " +
                                  format_number(surface.min_raw_eigenvalue, Precision::Human) + ")");
      }
      result.band_q = band.q;
      result.surface = std::move(surface);
    } catch (const Error& e) {
      result.warnings.push_back(std::string("uniform band unavailable: ") + e.what());
    }
  }
  return result;
}

void write_estimate(std::ostream& os, const EstimateResult& result, Precision precision) {
  const auto f = [&](double v) { return format_number(v, precision); };
  os << "point_id,b1,b2,h,n_eff_0,n_eff_1,theta_hat,se,ci_lower,ci_upper,band_lower,band_upper,error\n";
  for (const auto& r : result.rows) {
    os << r.point_id << ',' << f(r.point.x1) << ',' << f(r.point.x2) << ',' << f(r.h) << ',' << f(r.n_eff0) << ','
       << f(r.n_eff1) << ',' << f(r.theta_hat) << ',' << f(r.se) << ',' << f(r.ci_lower) << ',' << f(r.ci_upper)
       << ',' << f(r.band_lower) << ',' << f(r.band_upper) << ',';
    if (r.error) os << error_code_name(*r.error);
    os << '\n';
  }
}

void write_covariance(std::ostream& os, const EstimateResult& result, Precision precision) {
  os << "point_id,b1,b2";
  if (!result.surface) {
    os << '\n';
    return;
  }
  const auto& s = *result.surface;
  for (std::size_t j = 0; j < s.size(); ++j) os << ",xi_" << (j + 1);
  os << '\n';
  std::size_t j = 0;
  for (const auto& r : result.rows) {
    if (r.error) continue;
    os << r.point_id << ',' << format_number(r.point.x1, precision) << ',' << format_number(r.point.x2, precision);
    for (Eigen::Index c = 0; c < s.xi.cols(); ++c) {
      os << ',' << format_number(s.xi(static_cast<Eigen::Index>(j), c), precision);
    }
    os << '\n';
    ++j;
  }
}

namespace {

void write_to(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

int run_estimate(const RunConfig& config, std::ostream& log) {
  if (config.data.empty()) throw Error(ErrorCode::InvalidInput, "estimate needs --data");
  if (config.boundary.empty()) throw Error(ErrorCode::InvalidInput, "estimate needs --boundary");
  auto sample = std::make_shared<const Sample>(read_dataset(config.data));
  const auto boundary = load_boundary(config.boundary);
  const auto result = estimate(sample, boundary, config);

  for (const auto& w : result.warnings) log << "warning: " << w << '\n';
  for (const auto& r : result.rows) {
    if (r.error) log << "point " << r.point_id << ": " << error_code_name(*r.error) << ": " << r.message << '\n';
  }
  std::ostringstream csv;
  write_estimate(csv, result, config.precision);
  if (config.out.empty()) {
    std::cout << csv.str();
  } else {
    write_to(config.out, csv.str());
  }
  if (!config.dump_cov.empty()) {
    std::ostringstream cov;
    write_covariance(cov, result, config.precision);
    write_to(config.dump_cov, cov.str());
  }
  return result.any_failed() ? 2 : 0;
}

std::vector<ReportRow> read_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Schema, "empty report");
  const auto header = split_csv(line);
  static const char* const kColumns[] = {"point_id", "b1", "b2", "h", "bias", "sd", "rmse", "ec", "il"};
  if (header.size() != 9 || !std::equal(header.begin(), header.end(), std::begin(kColumns))) {
    throw Error(ErrorCode::Schema, "unexpected report header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 9) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 9 fields");
    double v[8];
    for (int k = 0; k < 8; ++k) {
      const auto cell = cells[static_cast<std::size_t>(k) + 1];
      if (cell.empty()) {
        v[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto parsed = to_double(cell);
      if (!parsed) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
      v[k] = *parsed;
    }
    rows.push_back({std::string(cells[0]), v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  return rows;
}

}  // namespace bdd
