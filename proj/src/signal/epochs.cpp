#include "phlb/signal/epochs.hpp"

#include "phlb/error.hpp"

#include <cmath>

namespace phlb::signal {

EpochSet EpochSet::subset(const std::vector<std::size_t>& indices) const {
  EpochSet out;
  out.window_s = window_s;
  out.sample_rate_hz = sample_rate_hz;
  out.n_channels = n_channels;
  out.length = length;
  out.epochs.reserve(indices.size());
  out.starts.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= epochs.size()) fail(ErrorCode::invalid_index, "EpochSet::subset: index out of range");
    out.epochs.push_back(epochs[i]);
    out.starts.push_back(starts[i]);
  }
  return out;
}

Matrix EpochSet::concatenate() const {
  Matrix out(n_channels, length * static_cast<Eigen::Index>(epochs.size()));
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    out.middleCols(static_cast<Eigen::Index>(e) * length, length) = epochs[e];
  }
  return out;
}

Eigen::Index epoch_length(double window_s, double sample_rate_hz) {
  const double samples = std::round(window_s * sample_rate_hz);
  if (!(samples >= 1.0)) fail(ErrorCode::invalid_window, "epoch: window shorter than one sample");
  return static_cast<Eigen::Index>(samples);
}

EpochSet epoch(const TimeSeriesMatrix& x, double window_s) {
  EpochSet set;
  set.window_s = window_s;
  set.sample_rate_hz = x.sample_rate_hz();
  set.n_channels = x.n_channels();
  set.length = epoch_length(window_s, x.sample_rate_hz());
  const Eigen::Index count = x.n_samples() / set.length;
  set.epochs.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index e = 0; e < count; ++e) {
    set.starts.push_back(e * set.length);
    set.epochs.push_back(x.data().middleCols(e * set.length, set.length));
  }
  return set;
}

std::vector<bool> mark_artifacts(const TimeSeriesMatrix& x_detect, double window_s,
                                 double p2p_threshold) {
  if (!(p2p_threshold > 0.0)) {
    fail(ErrorCode::invalid_threshold, "mark_artifacts: threshold must be positive");
  }
  const Eigen::Index length = epoch_length(window_s, x_detect.sample_rate_hz());
  const Eigen::Index count = x_detect.n_samples() / length;
  std::vector<bool> flagged(static_cast<std::size_t>(count), false);
  for (Eigen::Index e = 0; e < count; ++e) {
    const auto block = x_detect.data().middleCols(e * length, length);
    const Eigen::VectorXd p2p = block.rowwise().maxCoeff() - block.rowwise().minCoeff();
    flagged[static_cast<std::size_t>(e)] = p2p.maxCoeff() > p2p_threshold;
  }
  return flagged;
}

}  // namespace phlb::signal
