#include "bdd/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace bdd {

std::string format_number(double value, Precision precision) {
  if (std::isnan(value)) return {};
  char buf[64];
  if (precision == Precision::Full) {
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
  }
  const int len = std::snprintf(buf, sizeof buf, "%.6g", value);
  return {buf, static_cast<std::size_t>(len)};
}

}  // namespace bdd
