#pragma once

#include "phlb/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace phlb::source {

// Forward matrix A (channels x sources); columns are spatial patterns.
class LeadField {
 public:
  LeadField() = default;
  // Rejects empty, non-finite, or all-zero-column matrices (invalid_size).
  explicit LeadField(Matrix a, std::vector<std::string> channel_labels = {});

  const Matrix& matrix() const noexcept { return a_; }
  const std::vector<std::string>& channel_labels() const noexcept { return labels_; }
  Eigen::Index n_channels() const noexcept { return a_.rows(); }
  Eigen::Index n_sources() const noexcept { return a_.cols(); }
  Vector pattern(Eigen::Index source) const;

  // Common-average referenced copy: (I - 11^T / N_c) A.
  LeadField common_average_referenced() const;

 private:
  Matrix a_;
  std::vector<std::string> labels_;
};

// Minimum-norm inverse with identity source prior: M = A^T (lambda I + A A^T)^-1.
struct InverseOperator {
  Matrix m;  // sources x channels
  double lambda = 1.0;
  std::string source_prior = "identity";
  LeadField lead_field;
};

struct UnmixingModel {
  Matrix phi;     // components x channels
  Matrix mixing;  // channels x components, phi * mixing = I
  Vector channel_mean;
  int n_iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

using Projection = std::variant<InverseOperator, UnmixingModel>;

InverseOperator mne_inverse_operator(const LeadField& a, double lambda = 1.0);
TimeSeriesMatrix apply_inverse(const InverseOperator& op, const TimeSeriesMatrix& x);

struct FastIcaOptions {
  Eigen::Index n_components = 0;  // 0: all channels
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 1000;
};

// Symmetric fastICA with the log-cosh contrast on PCA-whitened data.
UnmixingModel fast_ica(const TimeSeriesMatrix& x, const FastIcaOptions& opts);
// phi * x (no re-centring: callers pass band-limited, zero-mean data).
TimeSeriesMatrix apply_unmixing(const UnmixingModel& model, const TimeSeriesMatrix& x);

TimeSeriesMatrix project(const Projection& projection, const TimeSeriesMatrix& x);
Eigen::Index source_count(const Projection& projection);
Eigen::Index channel_count(const Projection& projection);
// Forward pattern of one source: the lead-field column or the mixing column.
Vector source_pattern(const Projection& projection, Eigen::Index source);
std::string projection_name(const Projection& projection);

enum class PowerScale {
  rank,    // rank/(N_s - 1), ties by index
  linear,  // (var - min) / (max - min)
};

// Per-source relative power in [0, 1]: the weakest source maps to 0, the
// strongest to 1.
std::vector<double> relative_source_power(const TimeSeriesMatrix& s,
                                          PowerScale scale = PowerScale::rank);

// Smooth pseudo-topographies: Gaussian random vectors smoothed by a channel
// adjacency kernel over a hemispherical montage, unit-norm columns.
LeadField synth_lead_field(Eigen::Index n_channels, Eigen::Index n_sources, std::uint64_t seed);

struct SynthOptions {
  double duration_s = 600.0;
  double sample_rate_hz = 120.0;
  Band target_band{8.0, 12.0};
  Eigen::Index target_source_index = 0;
  double snr_db = 10.0;  // -infinity removes the target
  std::uint64_t seed = 0;
  double background_exponent = 1.0;  // power spectrum ~ 1/f^exponent
  double envelope_cutoff_hz = 1.0;
  double sensor_noise_fraction = 0.1;  // sensor noise power / background power
  double channel_rms = 8e-6;           // RMS of the strongest channel after scaling (volts)
};

struct SyntheticGroundTruth {
  Eigen::Index target_source_index = 0;
  Vector pattern;                       // a_z
  std::vector<double> envelope;         // |analytic(s_z)|, sensor scale
  std::vector<double> target_source;    // s_z, sensor scale
  double snr_db = 0.0;
  double noise_sigma = 0.0;             // E ~ N(0, sigma^2 I)
};

struct SyntheticRecording {
  TimeSeriesMatrix recording;
  SyntheticGroundTruth truth;
};

// X = A S + E with 1/f background sources and one band-limited target source
// whose amplitude follows a slow (<= envelope_cutoff_hz) random envelope.
// snr_db is target sensor power over background-plus-noise sensor power.
SyntheticRecording synth_recording(const LeadField& a, const SynthOptions& opts);

}  // namespace phlb::source
