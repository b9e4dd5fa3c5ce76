#include "bdd/error.hpp"

namespace bdd {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::InvalidBandwidth: return "invalid-bandwidth";
    case ErrorCode::InvalidLevel: return "invalid-level";
    case ErrorCode::InvalidData: return "invalid-data";
    case ErrorCode::InvalidPairing: return "invalid-pairing";
    case ErrorCode::SingularGram: return "singular-gram";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::DegenerateVariance: return "degenerate-variance";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::BandwidthSelectionFailed: return "bandwidth-selection-failed";
    case ErrorCode::NoMass: return "no-mass";
    case ErrorCode::ToleranceFailed: return "tolerance-failed";
    case ErrorCode::ContractViolation: return "contract-violation";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace bdd
