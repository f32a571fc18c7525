#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phaselens/spectral.hpp"

using namespace phaselens::spectral;
using phaselens::InvalidArgument;

namespace {

double max_error(const Spectrum& a, const Spectrum& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

Spectrum random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  Spectrum v(n);
  for (auto& x : v) x = Complex(d(rng), d(rng));
  return v;
}

}  // namespace

TEST(Fft, DeltaToConstant) {
  const Spectrum x{1.0, 0.0, 0.0, 0.0};
  EXPECT_LT(max_error(fft(x), Spectrum(4, 1.0)), 1e-15);
}

TEST(Fft, ConstantToDc) {
  const Complex c(2.5, -1.0);
  EXPECT_LT(max_error(fft(Spectrum(4, c)), Spectrum{4.0 * c, 0.0, 0.0, 0.0}), 1e-15);
}

TEST(Fft, ShiftedDelta) {
  const Spectrum x{0.0, 1.0, 0.0, 0.0};
  const Spectrum expected{1.0, Complex(0, -1), -1.0, Complex(0, 1)};
  EXPECT_LT(max_error(fft(x), expected), 1e-15);
}

TEST(Ifft, HandComputedCases) {
  EXPECT_LT(max_error(ifft(Spectrum(4, 1.0)), Spectrum{1.0, 0.0, 0.0, 0.0}), 1e-15);
  const Complex c(0.3, 0.7);
  Spectrum dc(8, 0.0);
  dc[0] = 8.0 * c;
  EXPECT_LT(max_error(ifft(dc), Spectrum(8, c)), 1e-15);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  EXPECT_THROW(fft(Spectrum(6, 1.0)), InvalidArgument);
  EXPECT_THROW(ifft(Spectrum(1, 1.0)), InvalidArgument);
  EXPECT_THROW(fft(Spectrum{}), InvalidArgument);
}

TEST(Fft, MatchesNaiveDft) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 2; n <= 256; n *= 2) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto x = random_vector(rng, n);
      EXPECT_LT(max_error(fft(x), oracle::naive_dft(x)), 1e-10) << "N=" << n;
      EXPECT_LT(max_error(ifft(fft(x)), x), 1e-12) << "N=" << n;
    }
  }
}

TEST(Fft, ParsevalAndLinearity) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 2; n <= 256; n *= 2) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    const auto fx = fft(x);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lhs += std::norm(x[i]);
      rhs += std::norm(fx[i]);
    }
    rhs /= static_cast<double>(n);
    EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);

    const Complex a(1.5, -0.5), b(-0.25, 2.0);
    Spectrum combo(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = a * x[i] + b * y[i];
    const auto fy = fft(y);
    Spectrum expected(n);
    for (std::size_t i = 0; i < n; ++i) expected[i] = a * fx[i] + b * fy[i];
    EXPECT_LT(max_error(fft(combo), expected), 1e-12);
  }
}

TEST(Wavenumbers, StandardOrdering) {
  EXPECT_EQ(wavenumbers(2), (std::vector<long>{0, -1}));
  EXPECT_EQ(wavenumbers(4), (std::vector<long>{0, 1, -2, -1}));
  EXPECT_EQ(wavenumbers(8), (std::vector<long>{0, 1, 2, 3, -4, -3, -2, -1}));
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    long sum = 0;
    for (long k : wavenumbers(n)) sum += k;
    EXPECT_EQ(sum, -static_cast<long>(n / 2));
  }
  EXPECT_THROW(wavenumbers(12), InvalidArgument);
}

TEST(Wavenumbers, OddDerivativeZeroesNyquist) {
  EXPECT_EQ(odd_derivative_wavenumbers(8), (std::vector<long>{0, 1, 2, 3, 0, -3, -2, -1}));
}

TEST(SpectralDerivative, SineToCosine) {
  for (std::size_t n : {4u, 8u, 16u, 64u}) {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = std::sin(2.0 * std::numbers::pi * j / n);
    const auto du = derivative(u, 1);
    const auto d3u = derivative(u, 3);
    for (std::size_t j = 0; j < n; ++j) {
      const double z = 2.0 * std::numbers::pi * j / n;
      EXPECT_NEAR(du[j], std::cos(z), 1e-10);
      EXPECT_NEAR(d3u[j], -std::cos(z), 1e-10);
    }
  }
}

TEST(Dealias, ZeroesHighModes) {
  Spectrum s(16, 1.0);
  dealias_two_thirds(s);
  const auto k = wavenumbers(16);
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_EQ(s[j] == Complex(0.0), std::abs(k[j]) > 16.0 / 3.0) << j;
  }
}
