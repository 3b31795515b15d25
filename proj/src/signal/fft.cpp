#include "phlb/signal/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace phlb::signal {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct BufferDeleter {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::unique_ptr<fftw_complex[], BufferDeleter> buf(fftw_alloc_complex(n));
  auto* data = reinterpret_cast<std::complex<double>*>(buf.get());
  std::copy(x.begin(), x.end(), data);

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return {data, data + n};
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
  return transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x) {
  auto y = transform(x, FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(y.size());
  for (auto& v : y) v *= inv;
  return y;
}

std::vector<std::complex<double>> rfft_full(std::span<const double> x) {
  std::vector<std::complex<double>> c(x.begin(), x.end());
  return fft(c);
}

std::vector<double> irfft_real(std::span<const std::complex<double>> spectrum) {
  const auto y = ifft(spectrum);
  std::vector<double> out(y.size());
  std::transform(y.begin(), y.end(), out.begin(), [](std::complex<double> v) { return v.real(); });
  return out;
}

double bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz) {
  const double df = sample_rate_hz / static_cast<double>(n);
  return k <= n / 2 ? static_cast<double>(k) * df
                    : -static_cast<double>(n - k) * df;
}

}  // namespace phlb::signal
