#pragma once

#include <stdexcept>
#include <string>

namespace phlb {

enum class ErrorCode {
  invalid_band,
  invalid_order,
  insufficient_samples,
  degenerate_reference,
  invalid_factor,
  invalid_threshold,
  invalid_window,
  no_data,
  shape_mismatch,
  symmetry_violation,
  rank_zero,
  invalid_regularization,
  invalid_request,
  degenerate_ranking,
  invalid_size,
  invalid_index,
  invalid_noise,
  degenerate_labels,
  undefined_correlation,
  invalid_pattern,
  insufficient_data,
  invalid_config,
  invalid_dimension,
  io,
  format,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; `code()` lets
// callers and tests distinguish the failure class without parsing messages.
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

}  // namespace phlb
