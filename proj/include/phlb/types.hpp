#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace phlb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Band {
  double low_hz = 8.0;
  double high_hz = 12.0;
};

// Continuous multichannel recording, channels x samples.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix() = default;
  // Throws ErrorCode::invalid_size / shape_mismatch when the invariants
  // (non-empty, positive finite rate, finite data, one label per row) fail.
  // Empty `labels` are replaced by "Ch1".."ChN".
  TimeSeriesMatrix(Matrix data, double sample_rate_hz,
                   std::vector<std::string> labels = {});

  const Matrix& data() const noexcept { return data_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  const std::vector<std::string>& channel_labels() const noexcept { return labels_; }

  Eigen::Index n_channels() const noexcept { return data_.rows(); }
  Eigen::Index n_samples() const noexcept { return data_.cols(); }
  double duration_s() const noexcept {
    return static_cast<double>(n_samples()) / sample_rate_hz_;
  }

  // Same rate and labels, new samples. Used by shape-preserving kernels.
  TimeSeriesMatrix with_data(Matrix data) const;

 private:
  Matrix data_;
  double sample_rate_hz_ = 1.0;
  std::vector<std::string> labels_;
};

std::vector<std::string> default_channel_labels(Eigen::Index n, const std::string& prefix = "Ch");

}  // namespace phlb
