#pragma once

#include "phlb/types.hpp"

#include <vector>

namespace phlb::signal {

// Non-overlapping, chronologically ordered windows of one recording.
struct EpochSet {
  std::vector<Matrix> epochs;  // each n_channels x length
  std::vector<Eigen::Index> starts;
  double window_s = 1.0;
  double sample_rate_hz = 1.0;
  Eigen::Index n_channels = 0;
  Eigen::Index length = 0;

  std::size_t size() const noexcept { return epochs.size(); }
  bool empty() const noexcept { return epochs.empty(); }

  // Subset in the given order (indices into this set).
  EpochSet subset(const std::vector<std::size_t>& indices) const;
  // Epochs concatenated along time, n_channels x (size * length).
  Matrix concatenate() const;
};

// Samples per epoch: round(window_s * rate). Throws invalid_window when < 1.
Eigen::Index epoch_length(double window_s, double sample_rate_hz);

// floor(N_t / L) epochs; trailing samples are dropped. A window longer than
// the recording yields an empty set.
EpochSet epoch(const TimeSeriesMatrix& x, double window_s);

// Flags epoch e when any channel's peak-to-peak amplitude within it exceeds
// the threshold (same units as the data).
std::vector<bool> mark_artifacts(const TimeSeriesMatrix& x_detect, double window_s,
                                 double p2p_threshold);

}  // namespace phlb::signal
