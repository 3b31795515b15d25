#pragma once

#include "phlb/types.hpp"

namespace phlb::signal {

// Subtracts the across-channel mean at each sample. Needs >= 2 channels.
TimeSeriesMatrix common_average_reference(const TimeSeriesMatrix& x);

// Keeps samples 0, factor, 2*factor, ... The caller is responsible for the
// anti-alias lowpass.
TimeSeriesMatrix decimate(const TimeSeriesMatrix& x, int factor);

// Rational-rate resampling by up/down: zero-stuffing, a linear-phase
// windowed-sinc lowpass at the tighter of the two Nyquist limits (group delay
// compensated), then keeping every down-th sample.
TimeSeriesMatrix resample_rational(const TimeSeriesMatrix& x, int up, int down);

// Resamples to an integer target rate when the source rate is integral too.
TimeSeriesMatrix resample_to(const TimeSeriesMatrix& x, double target_rate_hz);

}  // namespace phlb::signal
