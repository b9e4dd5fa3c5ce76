#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bdd {

enum class ErrorCode {
  InvalidInput,
  InvalidBandwidth,
  InvalidLevel,
  InvalidData,
  InvalidPairing,
  SingularGram,
  InsufficientData,
  DegenerateVariance,
  Degenerate,
  BandwidthSelectionFailed,
  NoMass,
  ToleranceFailed,
  ContractViolation,
  Schema,
  Parse,
  Io,
};

/// Short stable identifier used in CSV error columns and CLI messages.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what, std::optional<double> value = std::nullopt)
      : std::runtime_error(what), code_(code), value_(value) {}

  ErrorCode code() const noexcept { return code_; }

  /// Numeric payload, e.g. the offending eigenvalue for SingularGram.
  std::optional<double> value() const noexcept { return value_; }

private:
  ErrorCode code_;
  std::optional<double> value_;
};

}  // namespace bdd
