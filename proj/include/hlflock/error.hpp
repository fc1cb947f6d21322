#pragma once

#include <stdexcept>
#include <string>

namespace hlflock {

enum class ErrorCode {
  InvalidArgument,
  InvalidGraph,
  NegativeDistance,
  QuadratureFailure,
  MisalignedDelay,
  EmptyHorizon,
  OutOfWindow,
  NonFiniteState,
  HistoryExhausted,
  OffsetUnavailable,
  InsufficientData,
  NonPositiveSamples,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

// All library failures surface as this exception; the C layer maps the code
// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hlflock
