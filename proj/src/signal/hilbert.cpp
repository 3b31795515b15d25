#include "phlb/signal/hilbert.hpp"

#include "phlb/error.hpp"
#include "phlb/signal/fft.hpp"

#include <cmath>

namespace phlb::signal {

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) fail(ErrorCode::insufficient_samples, "analytic_signal: empty input");
  auto spectrum = rfft_full(x);
  // Bins 1..ceil(n/2)-1 are strictly positive frequencies; for even n the
  // bin n/2 is Nyquist and stays as is.
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spectrum[k] *= 2.0;
  const std::size_t negative_begin = (n % 2 == 0) ? n / 2 + 1 : (n + 1) / 2;
  for (std::size_t k = negative_begin; k < n; ++k) spectrum[k] = 0.0;
  return ifft(spectrum);
}

std::vector<double> hilbert_envelope(std::span<const double> x) {
  if (x.size() < 8) {
    fail(ErrorCode::insufficient_samples, "hilbert_envelope: need at least 8 samples");
  }
  const auto analytic = analytic_signal(x);
  std::vector<double> env(analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) env[i] = std::abs(analytic[i]);
  return env;
}

}  // namespace phlb::signal
