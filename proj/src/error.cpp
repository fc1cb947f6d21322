#include "hlflock/error.hpp"

namespace hlflock {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::MisalignedDelay: return "MisalignedDelay";
    case ErrorCode::EmptyHorizon: return "EmptyHorizon";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::HistoryExhausted: return "HistoryExhausted";
    case ErrorCode::OffsetUnavailable: return "OffsetUnavailable";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonPositiveSamples: return "NonPositiveSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hlflock
