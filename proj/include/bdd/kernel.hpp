#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bdd/geometry.hpp"
#include "bdd/sample.hpp"

namespace bdd {

enum class KernelFamily { Uniform, Triangular, Epanechnikov };

/// Univariate kernel supported on [-1, 1], stored unnormalized:
/// uniform = 1, triangular = 1 - |u|, epanechnikov = 0.75 (1 - u^2).
struct KernelSpec {
  KernelFamily family = KernelFamily::Triangular;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

KernelSpec parse_kernel(std::string_view name);
std::string_view kernel_name(const KernelSpec& spec) noexcept;

double kernel_eval(const KernelSpec& spec, double u) noexcept;

/// K(u/h) / h^2 (bivariate normalization). Throws InvalidBandwidth if h <= 0.
double kh_weight(const KernelSpec& spec, double u, double h);

enum class Side : std::uint8_t { Control = 0, Treated = 1 };

/// Signed distances from every observation to one evaluation point.
struct DistanceColumn {
  PointXY eval_pt;
  std::vector<double> values;
  std::vector<Side> side;

  std::size_t size() const noexcept { return values.size(); }
};

DistanceColumn build_distance_column(const Sample& sample, const PointXY& eval_pt,
                                     const AssignmentRule& rule,
                                     const DistanceMetric& metric = DistanceMetric::euclidean());

}  // namespace bdd
