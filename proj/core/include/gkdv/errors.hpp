#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gkdv {

enum class ErrorCode {
  invalid_argument,
  grid_mismatch,
  domain_too_small,
  singular_system,
  normalization,
  state_invalid,
  integration_halted,
  fit_refused,
  insufficient_samples,
  blow_up_detected,
  measurement_refused,
  geometry,
  interpolation_range,
  orthogonality,
  decomposition_failed,
  degenerate_configuration,
  search_failed,
  config,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure reported by the library. The code lets
/// callers (the CLI, the shooting controller) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace gkdv
