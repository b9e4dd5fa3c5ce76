// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "bdd/error.hpp"
#include "bdd/inference.hpp"
#include "bdd/locpoly.hpp"
#include "bdd/oracle.hpp"
#include "bdd/simulation.hpp"
#include "support.hpp"

using namespace bdd;

namespace {

constexpr double kPi = std::numbers::pi;
const KernelSpec kUni{KernelFamily::Uniform};
const KernelSpec kTri{KernelFamily::Triangular};
const KernelSpec kEpa{KernelFamily::Epanechnikov};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    out.pass = false;
    out.detail += "; runtime " + fmt("%.2f", secs) + " s over limit " + fmt("%.0f", limit_s) + " s";
  }
  if (!out.pass) ++failures;
  std::printf("criterion %2d %-34s %s  (%s) [%.2f s]\n", id, name.c_str(), out.pass ? "PASS" : "FAIL",
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("    info: %s\n", text.c_str());
  std::fflush(stdout);
}

// Shared Monte Carlo run for criteria 7, 8 and 10.
struct McRun {
  McConfig config;
  McReport report;
  std::vector<std::size_t> far;  ///< grid indices at arc distance >= 2h from the kink
  double seconds = 0.0;
};

McRun& mc_run() {
  static McRun run = [] {
    McRun r;
    r.config.n = 5000;
    r.config.reps = 500;
    r.config.grid_size = 21;
    r.config.kernel = kTri;
    r.config.p = 1;
    r.config.bandwidth = RuleOfThumb{};
    r.config.seed = 20240601;
    const auto t0 = std::chrono::steady_clock::now();
    r.report = run_monte_carlo(r.config);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double kink_arc = r.config.dgp.boundary().cumulative_arclength()[1];
    for (std::size_t k = 0; k < r.report.points.size(); ++k) {
      const auto& p = r.report.points[k];
      if (std::abs(p.arclength - kink_arc) >= 2 * p.h) r.far.push_back(k);
    }
    std::printf("    info: Monte Carlo n=%zu reps=%zu grid=%zu ran in %.1f s, %zu failed replications\n",
                r.config.n, r.config.reps, r.config.grid_size, r.seconds, r.report.failures);
    return r;
  }();
  return run;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  report(1, "bias oracle vanishes at s -> 0", 1.0, [] {
    double worst = 0.0;
    for (const auto& k : {kUni, kTri, kEpa}) worst = std::max(worst, std::abs(fixed_h_bias(k, 1, 1.0, 1e-6).bias));
    return Outcome{worst < 1e-5, "max |bias(1, 1e-6)| over kernels = " + fmt("%.3g", worst)};
  });

  report(2, "bias oracle slope at 0", 5.0, [] {
    const double step = 1e-4;
    const double target = 2 / kPi - 4 / (kPi * kPi);
    const double d = (fixed_h_bias(kUni, 1, 1.0, step).bias - fixed_h_bias(kUni, 1, 1.0, -step).bias) / (2 * step);
    return Outcome{std::abs(d - target) < 1e-4, "slope " + fmt("%.7f", d) + " vs " + fmt("%.7f", target)};
  });

  report(3, "scaling identity", 5.0, [] {
    double worst = 0.0;
    for (double h : {0.5, 0.25, 0.1}) {
      for (double f : {0.2, 0.5, 0.9}) {
        const double s = f * h;
        worst = std::max(worst, std::abs(fixed_h_bias(kTri, 1, h, s).bias - h * unit_bias(kTri, 1, s / h)));
      }
    }
    return Outcome{worst < 1e-8, "max deviation " + fmt("%.3g", worst)};
  });

  report(4, "arc oracle vs closed form", 10.0, [] {
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
      for (int j = 1; j <= 20; ++j) {
        const double s = i / 20.0, r = j / 20.0;
        ArcScene sc{{s, 0}, r, QuadrantRule{}, [](const PointXY& x) { return x.x2; },
                    [](const PointXY&) { return 1.0; }};
        worst = std::max(worst, std::abs(induced_theta(sc, Side::Treated) - corner_theta(s, r)));
      }
    }
    return Outcome{worst < 1e-8, "max deviation " + fmt("%.3g", worst)};
  });

  report(5, "polynomial reproduction", 5.0, [] {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> pick(0, 2);
    const KernelSpec kernels[] = {kUni, kTri, kEpa};
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int p = pick(gen);
      const auto kernel = kernels[pick(gen)];
      std::array<double, 3> c0{}, c1{};
      for (int j = 0; j <= p; ++j) {
        c0[j] = 3 * u(gen);
        c1[j] = 3 * u(gen);
      }
      std::vector<PointXY> x;
      std::vector<double> y;
      for (int i = 0; i < 80; ++i) {
        const double d = u(gen);
        const auto& c = d >= 0 ? c1 : c0;
        x.push_back({d, 0.0});
        y.push_back(c[0] + c[1] * d + c[2] * d * d);
      }
      const auto fit = fit_point(testing::make_sample(y, x), PointXY{0, 0}, testing::right_half(),
                                 DistanceMetric::euclidean(), kernel, 1.0 + std::abs(u(gen)), p);
      const double truth = c1[0] - c0[0];
      worst = std::max(worst, std::abs(fit.theta_hat - truth));
    }
    return Outcome{worst < 1e-9, "max |error| over 200 trials " + fmt("%.3g", worst)};
  });

  report(6, "uniform quantile calibration", 10.0, [] {
    const double q1 = uniform_quantile(Eigen::MatrixXd::Identity(1, 1), 0.05, 100000, 61);
    const double q2 = uniform_quantile(Eigen::MatrixXd::Identity(2, 2), 0.05, 100000, 62);
    const double q3 = uniform_quantile(Eigen::MatrixXd::Ones(2, 2), 0.05, 100000, 63);
    const bool ok = std::abs(q1 - 1.96) <= 0.03 && std::abs(q2 - 2.2365) <= 0.03 && std::abs(q3 - 1.96) <= 0.03;
    return Outcome{ok, "q = " + fmt("%.4f", q1) + ", " + fmt("%.4f", q2) + ", " + fmt("%.4f", q3)};
  });

  report(7, "pointwise coverage away from kink", 0.0, [] {
    auto& run = mc_run();
    if (!run.report.valid || run.far.empty()) return Outcome{false, "no valid far-from-kink points"};
    bool ok = true;
    std::string detail;
    for (std::size_t k : run.far) {
      const auto& p = run.report.points[k];
      ok = ok && p.ec >= 0.92 && p.ec <= 0.98;
      detail += (detail.empty() ? "" : ", ") + std::string("b") + std::to_string(k + 1) + " EC " + fmt("%.3f", p.ec);
    }
    return Outcome{ok, detail};
  });

  report(8, "variance calibration", 0.0, [] {
    auto& run = mc_run();
    if (!run.report.valid || run.far.empty()) return Outcome{false, "no valid far-from-kink points"};
    bool ok = true;
    std::string detail;
    for (std::size_t k : run.far) {
      const auto& p = run.report.points[k];
      const double ratio = p.mean_se / p.sd;
      ok = ok && std::abs(ratio - 1.0) <= 0.15;
      detail += (detail.empty() ? "" : ", ") + std::string("b") + std::to_string(k + 1) + " se/sd " +
                fmt("%.3f", ratio);
    }
    return Outcome{ok, detail};
  });

  report(9, "kink bias is linear in h", 10.0, [] {
    const auto worst = [](const KernelSpec& k, double h) {
      double m = 0.0;
      for (int i = 1; i < 400; ++i) m = std::max(m, std::abs(fixed_h_bias(k, 1, h, h * i / 400.0).bias));
      return m;
    };
    const double a = worst(kUni, 0.4), b = worst(kUni, 0.2);
    const double ratio = b / a;
    info("triangular kernel: max |bias(0.4, s)| / h = " + fmt("%.4f", worst(kTri, 0.4) / 0.4));
    const bool ok = a > 0.05 * 0.4 && std::abs(ratio - 0.5) <= 0.05;
    return Outcome{ok, "uniform kernel: max/h " + fmt("%.4f", a / 0.4) + ", halving ratio " + fmt("%.4f", ratio)};
  });

  report(10, "uniform band ordering", 0.0, [] {
    auto& run = mc_run();
    if (!run.report.valid) return Outcome{false, "invalid report"};
    const double floor_q = normal_quantile(0.975) - 0.03;
    std::size_t low_q = 0;
    for (const auto& rec : run.report.records) {
      if (rec.ok && rec.band_q < floor_q) ++low_q;
    }
    double min_ec = 1.0;
    std::size_t argmin = 0;
    for (std::size_t k = 0; k < run.report.points.size(); ++k) {
      if (run.report.points[k].ec < min_ec) {
        min_ec = run.report.points[k].ec;
        argmin = k;
      }
    }
    // Coverage of the band's own interval at each point; the joint event is a subset of each.
    double min_band_ec = 1.0;
    for (std::size_t k = 0; k < run.report.points.size(); ++k) {
      std::size_t hit = 0, used = 0;
      for (const auto& rec : run.report.records) {
        if (!rec.ok) continue;
        ++used;
        hit += std::abs(rec.theta_hat[k] - run.report.points[k].tau) <= rec.band_q * rec.se[k];
      }
      min_band_ec = std::min(min_band_ec, double(hit) / used);
    }
    const double kink_arc = run.config.dgp.boundary().cumulative_arclength()[1];
    info("lowest pointwise EC at b" + std::to_string(argmin + 1) + " (arc distance to kink " +
         fmt("%.1f", std::abs(run.report.points[argmin].arclength - kink_arc)) + "); min per-point band coverage " +
         fmt("%.3f", min_band_ec) + " >= uniform EC " + fmt("%.3f", run.report.uniform_ec));
    // Share of replications whose band covers every far point, for reference.
    std::size_t far_ok = 0, ok_reps = 0;
    for (const auto& rec : run.report.records) {
      if (!rec.ok) continue;
      ++ok_reps;
      bool all = true;
      for (std::size_t k : run.far) all = all && rec.covered[k];
      far_ok += all;
    }
    info("pointwise CIs cover all far points jointly in " + fmt("%.3f", double(far_ok) / ok_reps) + " of reps");
    const bool ok = low_q == 0 && run.report.uniform_ec <= min_ec;
    return Outcome{ok, std::to_string(low_q) + " reps with band q below " + fmt("%.3f", floor_q) + "; uniform EC " +
                           fmt("%.3f", run.report.uniform_ec) + " vs min pointwise EC " + fmt("%.3f", min_ec)};
  });

  report(11, "simulate is deterministic", 0.0, [] {
    const auto dir = std::filesystem::temp_directory_path() / ("bdd_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::string cmd = std::string(BDD_CLI_PATH) + " simulate --n 1500 --reps 25 --grid 9 --seed 11";
    std::vector<std::string> outs;
    for (const char* prefix : {"", "", "BDD_THREADS=1 "}) {
      const auto path = dir / ("run" + std::to_string(outs.size()) + ".csv");
      const int rc = std::system((std::string(prefix) + cmd + " --out " + path.string()).c_str());
      if (rc != 0) return Outcome{false, "simulate exited with " + std::to_string(rc)};
      outs.push_back(read_file(path));
    }
    std::filesystem::remove_all(dir);
    const bool ok = !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
    return Outcome{ok, std::to_string(outs[0].size()) + " bytes, identical across runs and worker counts: " +
                           (ok ? "yes" : "no")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
