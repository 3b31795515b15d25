#include "phlb/signal/iir.hpp"

#include "phlb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace phlb::signal {

namespace {

using Complex = std::complex<double>;

SecondOrderSection section_from_poles(Complex p1, Complex p2) {
  // Numerator (1 - z^-1)(1 + z^-1): one zero at DC, one at Nyquist.
  SecondOrderSection s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -(p1 + p2).real();
  s.a2 = (p1 * p2).real();
  return s;
}

}  // namespace

Complex IIRFilterSpec::response(double freq_hz) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const Complex zinv = std::polar(1.0, -omega);
  const Complex zinv2 = zinv * zinv;
  Complex h{1.0, 0.0};
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * zinv + s.b2 * zinv2) / (1.0 + s.a1 * zinv + s.a2 * zinv2);
  }
  return h;
}

std::vector<Complex> IIRFilterSpec::poles() const {
  std::vector<Complex> out;
  out.reserve(2 * sections.size());
  for (const auto& s : sections) {
    const Complex disc = std::sqrt(Complex(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

bool IIRFilterSpec::is_stable() const {
  const auto p = poles();
  return std::all_of(p.begin(), p.end(), [](Complex z) { return std::abs(z) < 1.0; });
}

IIRFilterSpec design_butterworth_bandpass(double low_hz, double high_hz, int order,
                                          double sample_rate_hz) {
  if (order < 1) fail(ErrorCode::invalid_order, "design_butterworth_bandpass: order must be >= 1");
  const double nyquist = sample_rate_hz / 2.0;
  if (!(sample_rate_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < nyquist)) {
    std::ostringstream msg;
    msg << "design_butterworth_bandpass: need 0 < low < high < Nyquist, got [" << low_hz << ", "
        << high_hz << "] at " << sample_rate_hz << " Hz";
    fail(ErrorCode::invalid_band, msg.str());
  }

  const double k = 2.0 * sample_rate_hz;
  const double w_low = k * std::tan(std::numbers::pi * low_hz / sample_rate_hz);
  const double w_high = k * std::tan(std::numbers::pi * high_hz / sample_rate_hz);
  const double bandwidth = w_high - w_low;
  const double center_sq = w_low * w_high;

  std::vector<Complex> upper;
  std::vector<double> real;
  for (int i = 0; i < order; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order);
    const Complex proto = std::polar(1.0, theta);
    // s^2 - p * B * s + W0^2 = 0 for each prototype pole p.
    const Complex pb = proto * bandwidth;
    const Complex disc = std::sqrt(pb * pb - 4.0 * center_sq);
    for (const Complex s : {(pb + disc) / 2.0, (pb - disc) / 2.0}) {
      const Complex z = (k + s) / (k - s);
      if (std::abs(z.imag()) <= 1e-12 * std::abs(z)) {
        real.push_back(z.real());
      } else if (z.imag() > 0.0) {
        upper.push_back(z);
      }
    }
  }
  std::sort(real.begin(), real.end());

  IIRFilterSpec spec;
  spec.low_hz = low_hz;
  spec.high_hz = high_hz;
  spec.order = order;
  spec.sample_rate_hz = sample_rate_hz;
  for (const Complex p : upper) spec.sections.push_back(section_from_poles(p, std::conj(p)));
  for (std::size_t i = 0; i + 1 < real.size(); i += 2) {
    spec.sections.push_back(section_from_poles(real[i], real[i + 1]));
  }
  std::sort(spec.sections.begin(), spec.sections.end(),
            [](const SecondOrderSection& a, const SecondOrderSection& b) { return a.a2 < b.a2; });

  // Unity gain at the digital image of the analog center frequency.
  const double center_hz =
      sample_rate_hz / std::numbers::pi * std::atan(std::sqrt(center_sq) / k);
  const double gain = 1.0 / spec.magnitude(center_hz);
  const double per_section = std::pow(gain, 1.0 / static_cast<double>(spec.sections.size()));
  for (auto& s : spec.sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return spec;
}

std::vector<double> sosfilt(const IIRFilterSpec& spec, std::span<const double> x,
                            std::span<const double> zi) {
  if (!zi.empty() && zi.size() != 2 * spec.sections.size()) {
    fail(ErrorCode::shape_mismatch, "sosfilt: zi needs two values per section");
  }
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < spec.sections.size(); ++k) {
    const auto& s = spec.sections[k];
    double z1 = zi.empty() ? 0.0 : zi[2 * k];
    double z2 = zi.empty() ? 0.0 : zi[2 * k + 1];
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> sosfilt_zi(const IIRFilterSpec& spec) {
  std::vector<double> zi;
  zi.reserve(2 * spec.sections.size());
  double scale = 1.0;
  for (const auto& s : spec.sections) {
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    zi.push_back(scale * (dc - s.b0));
    zi.push_back(scale * (s.b2 - s.a2 * dc));
    scale *= dc;
  }
  return zi;
}

Eigen::Index filtfilt_padding(const IIRFilterSpec& spec) {
  return 3 * (2 * static_cast<Eigen::Index>(spec.order));
}

std::vector<double> filtfilt(const IIRFilterSpec& spec, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index pad = filtfilt_padding(spec);
  if (n <= pad) {
    std::ostringstream msg;
    msg << "filtfilt: need more than " << pad << " samples, got " << n;
    fail(ErrorCode::insufficient_samples, msg.str());
  }

  std::vector<double> ext;
  ext.reserve(static_cast<std::size_t>(n + 2 * pad));
  const double first = x.front();
  const double last = x.back();
  for (Eigen::Index i = pad; i >= 1; --i) ext.push_back(2.0 * first - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (Eigen::Index i = n - 2; i >= n - 1 - pad; --i) ext.push_back(2.0 * last - x[i]);

  const std::vector<double> zi = sosfilt_zi(spec);
  std::vector<double> state(zi.size());

  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * ext.front();
  std::vector<double> y = sosfilt(spec, ext, state);
  std::reverse(y.begin(), y.end());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * y.front();
  y = sosfilt(spec, y, state);
  std::reverse(y.begin(), y.end());

  return {y.begin() + pad, y.begin() + pad + n};
}

TimeSeriesMatrix filtfilt(const IIRFilterSpec& spec, const TimeSeriesMatrix& x) {
  Matrix out(x.n_channels(), x.n_samples());
  std::vector<double> row(static_cast<std::size_t>(x.n_samples()));
  for (Eigen::Index c = 0; c < x.n_channels(); ++c) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), x.n_samples()) = x.data().row(c);
    const std::vector<double> y = filtfilt(spec, row);
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), x.n_samples());
  }
  return x.with_data(std::move(out));
}

TimeSeriesMatrix bandpass(const TimeSeriesMatrix& x, Band band, int order) {
  return filtfilt(design_butterworth_bandpass(band.low_hz, band.high_hz, order, x.sample_rate_hz()),
                  x);
}

}  // namespace phlb::signal
