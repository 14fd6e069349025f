#pragma once

#include <stdexcept>
#include <string>

namespace hattree {

enum class ErrorCode {
  invalid_parameter,
  invalid_input,
  capacity_exceeded,
  dimension_mismatch,
  parse_error,
  size_limit,
  convergence_failure,
  invalid_map,
  io_error,
  internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::capacity_exceeded: return "capacity-exceeded";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::size_limit: return "size-limit";
    case ErrorCode::convergence_failure: return "convergence-failure";
    case ErrorCode::invalid_map: return "invalid-map";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hattree
