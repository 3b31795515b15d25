#pragma once

#include "phlb/source/source_space.hpp"
#include "phlb/types.hpp"

namespace phlb::bench {

struct PreprocessOptions {
  Band broadband{0.2, 48.0};
  double target_rate_hz = 120.0;
  bool common_average = true;
  int filter_order = 5;
};

// Broadband zero-phase bandpass, rational resampling to the analysis rate,
// and optional common-average re-referencing.
TimeSeriesMatrix preprocess(const TimeSeriesMatrix& x, const PreprocessOptions& opts = {});

// The lead field under the same reference as preprocess() produces.
source::LeadField preprocess(const source::LeadField& a, const PreprocessOptions& opts = {});

}  // namespace phlb::bench
