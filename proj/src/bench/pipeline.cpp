#include "phlb/bench/pipeline.hpp"

#include "phlb/signal/iir.hpp"
#include "phlb/signal/transforms.hpp"

namespace phlb::bench {

TimeSeriesMatrix preprocess(const TimeSeriesMatrix& x, const PreprocessOptions& opts) {
  TimeSeriesMatrix y = signal::bandpass(x, opts.broadband, opts.filter_order);
  y = signal::resample_to(y, opts.target_rate_hz);
  if (opts.common_average) y = signal::common_average_reference(y);
  return y;
}

source::LeadField preprocess(const source::LeadField& a, const PreprocessOptions& opts) {
  return opts.common_average ? a.common_average_referenced() : a;
}

}  // namespace phlb::bench
