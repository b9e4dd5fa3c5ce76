#pragma once

#include <cstddef>
#include <vector>

#include "bdd/geometry.hpp"

namespace bdd {

/// Observed outcomes and scores. Treatment status is never stored; it is
/// derived from an AssignmentRule when needed.
struct Sample {
  std::vector<double> y;
  std::vector<PointXY> x;

  std::size_t size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.empty(); }

  /// Throws InvalidInput on length mismatch or non-finite entries.
  void validate() const;
};

}  // namespace bdd
