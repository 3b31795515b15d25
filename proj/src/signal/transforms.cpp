#include "phlb/signal/transforms.hpp"

#include "phlb/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace phlb::signal {

TimeSeriesMatrix common_average_reference(const TimeSeriesMatrix& x) {
  if (x.n_channels() < 2) {
    fail(ErrorCode::degenerate_reference, "common_average_reference: needs >= 2 channels");
  }
  const Eigen::RowVectorXd mean = x.data().colwise().mean();
  Matrix out = x.data().rowwise() - mean;
  return x.with_data(std::move(out));
}

TimeSeriesMatrix decimate(const TimeSeriesMatrix& x, int factor) {
  if (factor < 1) fail(ErrorCode::invalid_factor, "decimate: factor must be >= 1");
  const Eigen::Index n_out = (x.n_samples() + factor - 1) / factor;
  Matrix out(x.n_channels(), n_out);
  for (Eigen::Index j = 0; j < n_out; ++j) out.col(j) = x.data().col(j * factor);
  return TimeSeriesMatrix(std::move(out), x.sample_rate_hz() / factor, x.channel_labels());
}

namespace {

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double a = std::numbers::pi * t;
  return std::sin(a) / a;
}

// Kaiser-windowed sinc lowpass at `cutoff` (fraction of the Nyquist rate of
// the upsampled stream), passband gain `gain`, 2 * half + 1 taps.
std::vector<double> lowpass_fir(Eigen::Index half, double cutoff, double gain) {
  constexpr double beta = 5.0;
  const double norm = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  for (Eigen::Index k = -half; k <= half; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(half);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    h[static_cast<std::size_t>(k + half)] = gain * cutoff * sinc(cutoff * static_cast<double>(k)) * window;
  }
  return h;
}

}  // namespace

TimeSeriesMatrix resample_rational(const TimeSeriesMatrix& x, int up, int down) {
  if (up < 1 || down < 1) fail(ErrorCode::invalid_factor, "resample_rational: factors must be >= 1");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return x;

  const Eigen::Index half = 10 * std::max(up, down);
  const std::vector<double> h = lowpass_fir(half, 1.0 / std::max(up, down), up);
  const Eigen::Index n_in = x.n_samples();
  const Eigen::Index n_up = n_in * up;
  const Eigen::Index n_out = (n_up + down - 1) / down;

  Matrix out = Matrix::Zero(x.n_channels(), n_out);
  for (Eigen::Index m = 0; m < n_out; ++m) {
    // Output sample m sits at upsampled index m*down; the filter is centred
    // on it so the linear-phase delay is compensated.
    const Eigen::Index centre = m * down;
    const Eigen::Index j_lo = std::max<Eigen::Index>(0, centre - half);
    const Eigen::Index j_hi = std::min<Eigen::Index>(n_up - 1, centre + half);
    // Only upsampled indices that are multiples of `up` carry samples.
    Eigen::Index j = ((j_lo + up - 1) / up) * up;
    for (; j <= j_hi; j += up) {
      const double tap = h[static_cast<std::size_t>(centre - j + half)];
      out.col(m) += tap * x.data().col(j / up);
    }
  }
  return TimeSeriesMatrix(std::move(out), x.sample_rate_hz() * up / down, x.channel_labels());
}

TimeSeriesMatrix resample_to(const TimeSeriesMatrix& x, double target_rate_hz) {
  const double src = x.sample_rate_hz();
  if (src == target_rate_hz) return x;
  if (std::round(src) != src || std::round(target_rate_hz) != target_rate_hz || target_rate_hz <= 0) {
    std::ostringstream msg;
    msg << "resample_to: only integral rates are supported (" << src << " -> " << target_rate_hz << ")";
    fail(ErrorCode::invalid_factor, msg.str());
  }
  const auto s = static_cast<long long>(src);
  const auto t = static_cast<long long>(target_rate_hz);
  const long long g = std::gcd(s, t);
  return resample_rational(x, static_cast<int>(t / g), static_cast<int>(s / g));
}

}  // namespace phlb::signal
