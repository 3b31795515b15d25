#pragma once

#include <complex>
#include <span>
#include <vector>

namespace phlb::signal {

// Thin FFTW wrappers. Unnormalized forward transform; the inverse divides by n.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x);

// Real input, full complex spectrum of length n.
std::vector<std::complex<double>> rfft_full(std::span<const double> x);
// Real part of the inverse transform of a (Hermitian) spectrum.
std::vector<double> irfft_real(std::span<const std::complex<double>> spectrum);

// Signed frequency of DFT bin k for length n at the given rate.
double bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz);

}  // namespace phlb::signal
