#pragma once

#include "phlb/error.hpp"
#include "phlb/random.hpp"
#include "phlb/types.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#define CHECK_ERROR_CODE(expr, ec)                                   \
  do {                                                               \
    bool thrown_ = false;                                            \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const ::phlb::Error& e_) {                              \
      thrown_ = true;                                                \
      CHECK_MESSAGE(e_.code() == (ec), "got " << e_.what());         \
    }                                                                \
    CHECK_MESSAGE(thrown_, "expected " #ec " from " #expr);          \
  } while (0)

namespace phlb::test {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> sine(double freq_hz, double rate_hz, std::size_t n, double amplitude = 1.0,
                                double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = amplitude * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / rate_hz + phase);
  }
  return v;
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline Matrix random_spd(Rng& rng, Eigen::Index n) {
  const Matrix b = random_matrix(rng, n, n);
  return b * b.transpose() + 0.1 * Matrix::Identity(n, n);
}

// Least-squares fit of a*sin + b*cos at a known frequency over [begin, end);
// returns amplitude and phase relative to sin.
struct SineFit {
  double amplitude = 0.0;
  double phase = 0.0;
};

inline SineFit fit_sine(const std::vector<double>& x, double freq_hz, double rate_hz, std::size_t begin,
                        std::size_t end) {
  Matrix design(static_cast<Eigen::Index>(end - begin), 2);
  Vector y(design.rows());
  for (std::size_t i = begin; i < end; ++i) {
    const double t = 2.0 * kPi * freq_hz * static_cast<double>(i) / rate_hz;
    const auto r = static_cast<Eigen::Index>(i - begin);
    design(r, 0) = std::sin(t);
    design(r, 1) = std::cos(t);
    y(r) = x[i];
  }
  const Vector ab = design.colPivHouseholderQr().solve(y);
  return {std::hypot(ab(0), ab(1)), std::atan2(ab(1), ab(0))};
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin = 0,
                      std::size_t end = 0) {
  if (end == 0) end = a.size();
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    ma += a[i];
    mb += b[i];
  }
  const auto n = static_cast<double>(end - begin);
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline std::vector<double> row(const Matrix& m, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) v[static_cast<std::size_t>(i)] = m(r, i);
  return v;
}

inline TimeSeriesMatrix single_channel(const std::vector<double>& v, double rate_hz) {
  return TimeSeriesMatrix(Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                          rate_hz);
}

}  // namespace phlb::test
