#pragma once

// Radix-2 FFT and the wavenumber bookkeeping used by the pseudo-spectral KdV solver.
//
// Convention: fft is unnormalized, X_k = sum_n x_n exp(-2 pi i k n / N);
// ifft carries the 1/N factor.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "phaselens/error.hpp"

namespace phaselens::spectral {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

inline bool is_power_of_two(std::size_t n) { return n >= 2 && std::has_single_bit(n); }

inline void require_power_of_two(std::size_t n, const char* who) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument(std::string(who) + ": length " + std::to_string(n) +
                          " is not a power of two >= 2");
  }
}

namespace detail {

// In-place iterative decimation-in-time. sign = -1 forward, +1 inverse (unscaled).
inline void transform(std::span<Complex> a, int sign) {
  const std::size_t n = a.size();
  const unsigned bits = static_cast<unsigned>(std::countr_zero(n));

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rev = 0;
    for (unsigned b = 0; b < bits; ++b) rev |= ((i >> b) & 1u) << (bits - 1 - b);
    if (i < rev) std::swap(a[i], a[rev]);
  }

  // Twiddles from std::polar directly; a running product drifts past 1e-12 at N=256.
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    twiddle[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(j) /
                                     static_cast<double>(n));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex u = a[start + j];
        const Complex v = a[start + j + half] * twiddle[j * stride];
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
}

}  // namespace detail

inline Spectrum fft(std::span<const Complex> x) {
  require_power_of_two(x.size(), "fft");
  Spectrum out(x.begin(), x.end());
  detail::transform(out, -1);
  return out;
}

inline Spectrum fft(std::span<const double> x) {
  Spectrum c(x.begin(), x.end());
  return fft(std::span<const Complex>(c));
}

inline Spectrum ifft(std::span<const Complex> X) {
  require_power_of_two(X.size(), "ifft");
  Spectrum out(X.begin(), X.end());
  detail::transform(out, +1);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

/// [0, 1, ..., N/2-1, -N/2, ..., -1]
inline std::vector<long> wavenumbers(std::size_t n) {
  require_power_of_two(n, "wavenumbers");
  std::vector<long> k(n);
  const long half = static_cast<long>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    const long jj = static_cast<long>(j);
    k[j] = jj < half ? jj : jj - static_cast<long>(n);
  }
  return k;
}

/// Wavenumbers for odd-order derivatives: the Nyquist entry is zeroed.
inline std::vector<long> odd_derivative_wavenumbers(std::size_t n) {
  auto k = wavenumbers(n);
  k[n / 2] = 0;
  return k;
}

/// d^order/dz^order of a real periodic sample on z_j = 2 pi j / N.
inline std::vector<double> derivative(std::span<const double> u, int order) {
  if (order < 0) throw InvalidArgument("derivative: negative order");
  Spectrum w = fft(u);
  const auto k = order % 2 == 1 ? odd_derivative_wavenumbers(u.size()) : wavenumbers(u.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] *= std::pow(Complex(0.0, static_cast<double>(k[j])), order);
  }
  const Spectrum back = ifft(w);
  std::vector<double> out(back.size());
  for (std::size_t j = 0; j < back.size(); ++j) out[j] = back[j].real();
  return out;
}

/// Two-thirds rule: zero every mode with |k| > N/3.
inline void dealias_two_thirds(std::span<Complex> spectrum) {
  const auto k = wavenumbers(spectrum.size());
  const double cutoff = static_cast<double>(spectrum.size()) / 3.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (std::abs(static_cast<double>(k[j])) > cutoff) spectrum[j] = 0.0;
  }
}

}  // namespace phaselens::spectral
