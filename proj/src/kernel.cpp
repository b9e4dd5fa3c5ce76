#include "bdd/kernel.hpp"

#include <cmath>

#include "bdd/error.hpp"

namespace bdd {

void Sample::validate() const {
  if (y.size() != x.size()) throw Error(ErrorCode::InvalidInput, "sample y/x length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || !is_finite(x[i])) {
      throw Error(ErrorCode::InvalidInput, "non-finite value in sample row " + std::to_string(i + 1));
    }
  }
}

KernelSpec parse_kernel(std::string_view name) {
  if (name == "uniform") return {KernelFamily::Uniform};
  if (name == "triangular") return {KernelFamily::Triangular};
  if (name == "epanechnikov") return {KernelFamily::Epanechnikov};
  throw Error(ErrorCode::InvalidInput, "unknown kernel '" + std::string(name) + "'");
}

std::string_view kernel_name(const KernelSpec& spec) noexcept {
  switch (spec.family) {
    case KernelFamily::Uniform: return "uniform";
    case KernelFamily::Triangular: return "triangular";
    case KernelFamily::Epanechnikov: return "epanechnikov";
  }
  return "unknown";
}

double kernel_eval(const KernelSpec& spec, double u) noexcept {
  const double a = std::abs(u);
  if (!(a <= 1.0)) return 0.0;
  switch (spec.family) {
    case KernelFamily::Uniform: return 1.0;
    case KernelFamily::Triangular: return 1.0 - a;
    case KernelFamily::Epanechnikov: return 0.75 * (1.0 - a * a);
  }
  return 0.0;
}

double kh_weight(const KernelSpec& spec, double u, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive and finite", h);
  }
  return kernel_eval(spec, u / h) / (h * h);
}

DistanceColumn build_distance_column(const Sample& sample, const PointXY& eval_pt,
                                     const AssignmentRule& rule, const DistanceMetric& metric) {
  if (sample.empty()) throw Error(ErrorCode::InvalidInput, "empty sample");
  DistanceColumn col;
  col.eval_pt = eval_pt;
  col.values.resize(sample.size());
  col.side.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const bool treated = rule.treated(sample.x[i]);
    const double d = distance(sample.x[i], eval_pt, metric);
    col.values[i] = treated ? d : -d;
    col.side[i] = treated ? Side::Treated : Side::Control;
  }
  return col;
}

}  // namespace bdd
