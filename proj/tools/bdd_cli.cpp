#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bdd/error.hpp"
#include "bdd/io.hpp"
#include "bdd/oracle.hpp"
#include "bdd/simulation.hpp"

namespace {

// Flags are bound to scratch values and copied over the config only when given,
// so they take precedence over --config without clobbering it.
class Overrides {
public:
  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& name, T bdd::RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    auto* opt = app.add_option(name, *value, help);
    apply_.push_back([opt, value, field](bdd::RunConfig& c) {
      if (opt->count() > 0) c.*field = *value;
    });
    return opt;
  }

  CLI::Option* add_path(CLI::App& app, const std::string& name, std::filesystem::path bdd::RunConfig::*field,
                        const std::string& help) {
    auto value = std::make_shared<std::string>();
    auto* opt = app.add_option(name, *value, help);
    apply_.push_back([opt, value, field](bdd::RunConfig& c) {
      if (opt->count() > 0) c.*field = *value;
    });
    return opt;
  }

  template <typename Fn>
  CLI::Option* add_string(CLI::App& app, const std::string& name, Fn set, const std::string& help) {
    auto value = std::make_shared<std::string>();
    auto* opt = app.add_option(name, *value, help);
    apply_.push_back([opt, value, set](bdd::RunConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
    return opt;
  }

  void apply(bdd::RunConfig& c) const {
    for (const auto& f : apply_) f(c);
  }

private:
  std::vector<std::function<void(bdd::RunConfig&)>> apply_;
};

void add_common(CLI::App& app, Overrides& o) {
  o.add_string(app, "--kernel", [](bdd::RunConfig& c, const std::string& v) { c.kernel = bdd::parse_kernel(v); },
               "uniform | triangular | epanechnikov (default triangular)");
  o.add(app, "--p", &bdd::RunConfig::p, "local polynomial order (default 1)");
  o.add(app, "--h", &bdd::RunConfig::h, "bandwidth for --bw-rule fixed (bias-oracle: h)");
  o.add_path(app, "--out", &bdd::RunConfig::out, "output CSV (default stdout)");
  o.add_string(app, "--precision",
               [](bdd::RunConfig& c, const std::string& v) { c.precision = bdd::parse_precision(v); },
               "human (6 significant digits) | full");
}

void add_inference(CLI::App& app, Overrides& o) {
  o.add(app, "--bw-rule", &bdd::RunConfig::bw_rule, "fixed | rot | mse | kink (default rot)")
      ->check(CLI::IsMember({"fixed", "rot", "mse", "kink"}));
  o.add(app, "--c0", &bdd::RunConfig::c0, "rule-of-thumb multiplier");
  o.add(app, "--bw-exponent", &bdd::RunConfig::bw_exponent, "rule-of-thumb rate exponent (default 0.25)");
  o.add(app, "--alpha", &bdd::RunConfig::alpha, "significance level (default 0.05)");
  o.add(app, "--band-draws", &bdd::RunConfig::band_draws, "Gaussian draws for the band quantile (default 10000)");
  o.add(app, "--seed", &bdd::RunConfig::seed, "random seed (default 1)");
  o.add(app, "--grid", &bdd::RunConfig::grid, "number of boundary evaluation points (default 21)");
}

std::vector<double> s_values(const std::string& spec, double h) {
  std::vector<double> out;
  if (spec.find(',') == std::string::npos && spec.find('.') == std::string::npos) {
    const int count = std::stoi(spec);
    if (count < 1) throw bdd::Error(bdd::ErrorCode::InvalidInput, "--s-grid count must be positive");
    for (int k = 1; k <= count; ++k) out.push_back(h * k / (count + 1));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void emit(const bdd::RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw bdd::Error(bdd::ErrorCode::Io, "cannot write '" + c.out.string() + "'");
  f << text;
}

int run_simulate(const bdd::RunConfig& c) {
  c.validate();
  bdd::McConfig mc;
  mc.n = c.n;
  mc.reps = c.reps;
  mc.grid_size = c.grid;
  mc.kernel = c.kernel;
  mc.p = c.p;
  mc.bandwidth = c.bandwidth_rule();
  mc.alpha = c.alpha;
  mc.band_draws = c.band_draws;
  mc.seed = c.seed;
  const auto report = bdd::run_monte_carlo(mc);
  std::ostringstream os;
  bdd::write_report(os, report, c.precision);
  emit(c, os.str());
  if (!c.reps_out.empty()) {
    std::ofstream f(c.reps_out, std::ios::binary);
    if (!f) throw bdd::Error(bdd::ErrorCode::Io, "cannot write '" + c.reps_out.string() + "'");
    bdd::write_replications(f, report, c.precision);
  }
  if (report.failures > 0) {
    std::cerr << report.failures << " of " << report.reps << " replications failed\n";
  }
  if (!report.valid) {
    std::cerr << "report invalid: failure rate above " << mc.max_failure_rate << '\n';
    return 2;
  }
  return 0;
}

int run_bias_oracle(const bdd::RunConfig& c) {
  const double h = c.h > 0.0 ? c.h : 1.0;
  std::ostringstream os;
  os << "s,bias\n";
  for (double s : s_values(c.s_grid, h)) {
    const auto r = bdd::fixed_h_bias(c.kernel, c.p, h, s);
    os << bdd::format_number(s, c.precision) << ',' << bdd::format_number(r.bias, c.precision) << '\n';
  }
  emit(c, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-based local polynomial estimation and inference for boundary discontinuity designs"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with defaults for any flag (flags win)");

  Overrides est_o;
  auto* est = app.add_subcommand("estimate", "estimate the effect curve with pointwise intervals and a uniform band");
  add_common(*est, est_o);
  add_inference(*est, est_o);
  est_o.add_path(*est, "--data", &bdd::RunConfig::data, "CSV with columns y,x1,x2");
  est_o.add_path(*est, "--boundary", &bdd::RunConfig::boundary, "boundary JSON");
  est_o.add_path(*est, "--dump-cov", &bdd::RunConfig::dump_cov, "write the covariance surface to this CSV");
  est_o.add(*est, "--perimeter-multiple", &bdd::RunConfig::perimeter_multiple,
            "warn when boundary length inside the kernel support exceeds this multiple of h");
  est->add_option("--config", config_path, "JSON file with defaults for any flag (flags win)");

  Overrides sim_o;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage study on the calibrated design");
  add_common(*sim, sim_o);
  add_inference(*sim, sim_o);
  sim_o.add(*sim, "--n", &bdd::RunConfig::n, "sample size per replication (default 5000)");
  sim_o.add(*sim, "--reps", &bdd::RunConfig::reps, "replications (default 500)");
  sim_o.add_path(*sim, "--reps-out", &bdd::RunConfig::reps_out, "per-replication CSV (h, estimates, band q)");
  sim->add_option("--config", config_path, "JSON file with defaults for any flag (flags win)");

  Overrides bias_o;
  auto* bias = app.add_subcommand("bias-oracle", "population bias of the corner example as a function of s");
  add_common(*bias, bias_o);
  bias_o.add(*bias, "--s-grid", &bdd::RunConfig::s_grid, "count N (s = h k/(N+1)) or comma-separated s values");
  bias->add_option("--config", config_path, "JSON file with defaults for any flag (flags win)");

  CLI11_PARSE(app, argc, argv);

  try {
    bdd::RunConfig config;
    if (!config_path.empty()) bdd::apply_config_json(bdd::load_json(config_path), config);
    if (est->parsed()) {
      est_o.apply(config);
      return bdd::run_estimate(config, std::cerr);
    }
    if (sim->parsed()) {
      sim_o.apply(config);
      return run_simulate(config);
    }
    bias_o.apply(config);
    return run_bias_oracle(config);
  } catch (const bdd::Error& e) {
    std::cerr << "error: " << bdd::error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
