#include "phlb/error.hpp"
#include "phlb/random.hpp"
#include "phlb/signal/fft.hpp"
#include "phlb/signal/hilbert.hpp"
#include "phlb/source/source_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phlb::source {

namespace {

// Stream ids for mix_seed, one per random component of the recording.
enum Stream : std::uint64_t { kBackground = 1, kCarrier, kEnvelope, kSensor };

std::vector<double> white(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

// Multiplies the spectrum of x by gain(|f|) and returns the real inverse.
template <class Gain>
std::vector<double> shape_spectrum(const std::vector<double>& x, double rate, Gain gain) {
  auto spec = signal::rfft_full(x);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] *= gain(std::abs(signal::bin_frequency(k, spec.size(), rate)));
  }
  return signal::irfft_real(spec);
}

void normalize_unit_variance(std::vector<double>& v) {
  Eigen::Map<Vector> m(v.data(), static_cast<Eigen::Index>(v.size()));
  m.array() -= m.mean();
  const double sd = std::sqrt(m.squaredNorm() / static_cast<double>(v.size()));
  if (sd > 0.0) m /= sd;
}

double mean_power(const Matrix& m) { return m.squaredNorm() / static_cast<double>(m.size()); }

}  // namespace

SyntheticRecording synth_recording(const LeadField& a, const SynthOptions& opts) {
  const double rate = opts.sample_rate_hz;
  if (!(rate > 0.0)) fail(ErrorCode::invalid_size, "synth_recording: sample rate must be positive");
  const auto n_t = static_cast<Eigen::Index>(std::llround(opts.duration_s * rate));
  if (n_t < static_cast<Eigen::Index>(std::ceil(4.0 * rate))) {
    fail(ErrorCode::insufficient_samples, "synth_recording: need at least 4 s of data");
  }
  const Band band = opts.target_band;
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz && band.high_hz < rate / 2.0)) {
    fail(ErrorCode::invalid_band, "synth_recording: invalid target band");
  }
  const Eigen::Index target = opts.target_source_index;
  if (target < 0 || target >= a.n_sources()) {
    fail(ErrorCode::invalid_index, "synth_recording: target source index out of range");
  }
  const auto n = static_cast<std::size_t>(n_t);
  const Matrix& A = a.matrix();

  // Background: 1/f^exponent power spectrum, flattened below 1 Hz so that
  // slow drifts do not dominate the variance; unit variance per source.
  Matrix background_sources = Matrix::Zero(a.n_sources(), n_t);
  Rng bg_rng(mix_seed(opts.seed, kBackground));
  const double half_exp = opts.background_exponent / 2.0;
  for (Eigen::Index j = 0; j < a.n_sources(); ++j) {
    std::vector<double> s = white(bg_rng, n);
    if (j == target) continue;  // keep the stream aligned across targets
    s = shape_spectrum(s, rate, [&](double f) {
      return f == 0.0 ? 0.0 : std::pow(std::max(f, 1.0), -half_exp);
    });
    normalize_unit_variance(s);
    background_sources.row(j) = Eigen::Map<const Eigen::RowVectorXd>(s.data(), n_t);
  }
  const Matrix background = A * background_sources;
  const double background_power = mean_power(background);

  // Target: band-limited carrier times a rectified slow Gaussian process.
  Rng carrier_rng(mix_seed(opts.seed, kCarrier));
  std::vector<double> carrier = shape_spectrum(white(carrier_rng, n), rate, [&](double f) {
    return (f >= band.low_hz && f <= band.high_hz) ? 1.0 : 0.0;
  });
  normalize_unit_variance(carrier);
  Rng env_rng(mix_seed(opts.seed, kEnvelope));
  std::vector<double> slow = shape_spectrum(white(env_rng, n), rate, [&](double f) {
    return (f > 0.0 && f <= opts.envelope_cutoff_hz) ? 1.0 : 0.0;
  });
  normalize_unit_variance(slow);
  std::vector<double> target_source(n);
  for (std::size_t i = 0; i < n; ++i) target_source[i] = std::abs(slow[i]) * carrier[i];
  normalize_unit_variance(target_source);

  // Sensor noise relative to the projected background.
  double sigma = std::sqrt(opts.sensor_noise_fraction * background_power);
  Rng sensor_rng(mix_seed(opts.seed, kSensor));
  Matrix sensor(A.rows(), n_t);
  for (Eigen::Index t = 0; t < n_t; ++t) {
    for (Eigen::Index c = 0; c < A.rows(); ++c) sensor(c, t) = sensor_rng.normal();
  }
  sensor *= sigma;
  const double rest_power = background_power + sigma * sigma;

  // Target gain for the requested ratio of target to rest sensor power.
  const Eigen::RowVectorXd s_row = Eigen::Map<const Eigen::RowVectorXd>(target_source.data(), n_t);
  const double unit_target_power = A.col(target).squaredNorm() / static_cast<double>(A.rows());
  double gain = 0.0;
  if (std::isfinite(opts.snr_db)) {
    gain = std::sqrt(std::pow(10.0, opts.snr_db / 10.0) * rest_power / unit_target_power);
  } else if (!(opts.snr_db < 0.0)) {
    fail(ErrorCode::invalid_request, "synth_recording: snr_db must be finite or -inf");
  }

  Matrix x = background + sensor + gain * A.col(target) * s_row;

  // Global scale to a plausible EEG amplitude; metrics are scale-invariant.
  const double peak_rms = std::sqrt((x.rowwise().squaredNorm() / static_cast<double>(n_t)).maxCoeff());
  const double scale = peak_rms > 0.0 ? opts.channel_rms / peak_rms : 1.0;
  x *= scale;
  sigma *= scale;

  SyntheticRecording out{TimeSeriesMatrix(std::move(x), rate, a.channel_labels()), {}};
  SyntheticGroundTruth& truth = out.truth;
  truth.target_source_index = target;
  truth.pattern = A.col(target);
  truth.snr_db = opts.snr_db;
  truth.noise_sigma = sigma;
  truth.target_source.resize(n);
  for (std::size_t i = 0; i < n; ++i) truth.target_source[i] = gain * scale * target_source[i];
  truth.envelope = signal::hilbert_envelope(truth.target_source);
  return out;
}

}  // namespace phlb::source
