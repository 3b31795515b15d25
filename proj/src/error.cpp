#include "phlb/error.hpp"

namespace phlb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_band: return "invalid-band";
    case ErrorCode::invalid_order: return "invalid-order";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::degenerate_reference: return "degenerate-reference";
    case ErrorCode::invalid_factor: return "invalid-factor";
    case ErrorCode::invalid_threshold: return "invalid-threshold";
    case ErrorCode::invalid_window: return "invalid-window";
    case ErrorCode::no_data: return "no-data";
    case ErrorCode::shape_mismatch: return "shape";
    case ErrorCode::symmetry_violation: return "symmetry-violation";
    case ErrorCode::rank_zero: return "rank-zero";
    case ErrorCode::invalid_regularization: return "invalid-regularization";
    case ErrorCode::invalid_request: return "invalid-request";
    case ErrorCode::degenerate_ranking: return "degenerate-ranking";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::invalid_index: return "invalid-index";
    case ErrorCode::invalid_noise: return "invalid-noise";
    case ErrorCode::degenerate_labels: return "degenerate-labels";
    case ErrorCode::undefined_correlation: return "undefined-correlation";
    case ErrorCode::invalid_pattern: return "invalid-pattern";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
  }
  return "unknown";
}

}  // namespace phlb
