#pragma once

#include <complex>
#include <span>
#include <vector>

namespace phlb::signal {

// Discrete analytic signal by the frequency-domain construction: the full
// length DFT, negative frequencies zeroed, positive ones doubled, DC and (for
// even lengths) the Nyquist bin left unchanged. No zero padding.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

// |analytic_signal(x)|. Requires at least 8 samples.
std::vector<double> hilbert_envelope(std::span<const double> x);

}  // namespace phlb::signal
