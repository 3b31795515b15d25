#pragma once

#include "phlb/types.hpp"

#include <complex>
#include <span>
#include <vector>

namespace phlb::signal {

// One biquad, a0 normalized to 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct SecondOrderSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct IIRFilterSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  int order = 0;  // analog lowpass prototype order
  double sample_rate_hz = 0.0;
  std::vector<SecondOrderSection> sections;

  // Complex frequency response of the cascade at `freq_hz`.
  std::complex<double> response(double freq_hz) const;
  double magnitude(double freq_hz) const { return std::abs(response(freq_hz)); }
  // Roots of every section's denominator.
  std::vector<std::complex<double>> poles() const;
  bool is_stable() const;
};

// Butterworth bandpass from the analog prototype: lowpass->bandpass mapping
// on pre-warped edges, then the bilinear transform. A prototype of order n
// yields 2n poles, realized as n second-order sections with one zero at
// z = 1 and one at z = -1 each. Unity gain at the geometric band center.
IIRFilterSpec design_butterworth_bandpass(double low_hz, double high_hz, int order,
                                          double sample_rate_hz);

// Single pass through the cascade (direct form II transposed). `zi` holds two
// state values per section; empty means zero initial state.
std::vector<double> sosfilt(const IIRFilterSpec& spec, std::span<const double> x,
                            std::span<const double> zi = {});

// Steady-state initial conditions for a unit step, two per section.
std::vector<double> sosfilt_zi(const IIRFilterSpec& spec);

// Edge padding used by filtfilt: 3 * (2 * order) samples.
Eigen::Index filtfilt_padding(const IIRFilterSpec& spec);

// Forward-backward (zero-phase) application with odd reflective padding.
std::vector<double> filtfilt(const IIRFilterSpec& spec, std::span<const double> x);
TimeSeriesMatrix filtfilt(const IIRFilterSpec& spec, const TimeSeriesMatrix& x);

// Order-5 zero-phase Butterworth bandpass designed for the recording's rate.
TimeSeriesMatrix bandpass(const TimeSeriesMatrix& x, Band band, int order = 5);

}  // namespace phlb::signal
