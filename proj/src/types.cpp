#include "phlb/types.hpp"

#include "phlb/error.hpp"

#include <cmath>
#include <utility>

namespace phlb {

std::vector<std::string> default_channel_labels(Eigen::Index n, const std::string& prefix) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i + 1));
  return labels;
}

TimeSeriesMatrix::TimeSeriesMatrix(Matrix data, double sample_rate_hz,
                                   std::vector<std::string> labels)
    : data_(std::move(data)), sample_rate_hz_(sample_rate_hz), labels_(std::move(labels)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    fail(ErrorCode::invalid_size, "TimeSeriesMatrix: needs at least one channel and one sample");
  }
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    fail(ErrorCode::invalid_size, "TimeSeriesMatrix: sample rate must be positive and finite");
  }
  if (!data_.allFinite()) {
    fail(ErrorCode::invalid_size, "TimeSeriesMatrix: non-finite sample values");
  }
  if (labels_.empty()) {
    labels_ = default_channel_labels(data_.rows());
  } else if (static_cast<Eigen::Index>(labels_.size()) != data_.rows()) {
    fail(ErrorCode::shape_mismatch, "TimeSeriesMatrix: one label per channel required");
  }
}

TimeSeriesMatrix TimeSeriesMatrix::with_data(Matrix data) const {
  if (data.rows() == n_channels()) return TimeSeriesMatrix(std::move(data), sample_rate_hz_, labels_);
  return TimeSeriesMatrix(std::move(data), sample_rate_hz_);
}

}  // namespace phlb
