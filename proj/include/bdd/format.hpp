#pragma once

#include <string>

namespace bdd {

/// Human: 6 significant digits. Full: shortest text that round-trips the double.
enum class Precision { Human, Full };

/// NaN is written as an empty field.
std::string format_number(double value, Precision precision);

}  // namespace bdd
