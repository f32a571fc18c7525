#pragma once

// Pseudo-spectral KdV solver, u_t + 6 u u_x + u_xxx = 0 on [-l, l) with periodic
// boundaries. The grid is mapped to z = pi x / l + pi in [0, 2 pi), the linear
// dispersion is absorbed by the integrating factor alpha_k(t) = exp(-i k^3 pi^3 t / l^3),
// and the transformed coefficients g_k = alpha_k w_k are advanced with RK4.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "phaselens/error.hpp"
#include "phaselens/matrix.hpp"
#include "phaselens/ode.hpp"
#include "phaselens/spectral.hpp"

namespace phaselens::kdv {

using spectral::Complex;
using spectral::Spectrum;

/// Default step count: 256 for N = 16, 1000 otherwise.
inline std::size_t default_steps(std::size_t grid) { return grid <= 16 ? 256 : 1000; }

/// Stability-motivated step 0.4 / N^2.
inline double default_dt(std::size_t grid) {
  const double n = static_cast<double>(grid);
  return 0.4 / (n * n);
}

struct Params {
  std::size_t grid = 128;                  // N, power of two
  double velocity = 16.0;                  // soliton speed v
  double half_length = std::numbers::pi;   // l, domain [-l, l)
  double dt = default_dt(128);
  std::size_t steps = 1000;
  std::size_t record_stride = 1;           // keep every n-th step
  bool dealias = false;

  static Params with_defaults(std::size_t grid, double velocity) {
    Params p;
    p.grid = grid;
    p.velocity = velocity;
    p.dt = default_dt(grid);
    p.steps = default_steps(grid);
    return p;
  }

  void validate() const {
    spectral::require_power_of_two(grid, "kdv grid");
    if (!(velocity > 0.0) || !std::isfinite(velocity))
      throw InvalidArgument("kdv: velocity must be positive");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
      throw InvalidArgument("kdv: half-length must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("kdv: dt must be positive");
    if (steps == 0) throw InvalidArgument("kdv: steps must be positive");
    if (record_stride == 0) throw InvalidArgument("kdv: record stride must be positive");
  }
};

/// u(x, t) = (v/2) sech^2((sqrt(v)/2)(x - v t)) on the real line.
inline double exact_soliton(double x, double t, double v) {
  const double s = 1.0 / std::cosh(0.5 * std::sqrt(v) * (x - v * t));
  return 0.5 * v * s * s;
}

/// Physical coordinate of node j: x_j = l (z_j - pi) / pi with z_j = 2 pi j / N.
inline std::vector<double> grid_points(std::size_t grid, double half_length) {
  std::vector<double> x(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double z = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid);
    x[j] = half_length * (z - std::numbers::pi) / std::numbers::pi;
  }
  return x;
}

inline std::vector<double> initial_condition(const Params& p) {
  auto x = grid_points(p.grid, p.half_length);
  for (double& xi : x) xi = exact_soliton(xi, 0.0, p.velocity);
  return x;
}

/// Right-hand side of the integrating-factor ODE, dg/dt = -(3 i pi k / l) alpha F[(F^-1(g/alpha))^2].
/// Holds the wavenumber tables so repeated evaluation inside RK4 does not rebuild them.
class SpectralRhs {
public:
  explicit SpectralRhs(const Params& p)
      : dealias_(p.dealias), k_(spectral::odd_derivative_wavenumbers(p.grid)) {
    p.validate();
    const double scale = std::numbers::pi / p.half_length;
    dispersion_.resize(k_.size());
    advection_.resize(k_.size());
    for (std::size_t j = 0; j < k_.size(); ++j) {
      const double k = static_cast<double>(k_[j]);
      dispersion_[j] = k * k * k * scale * scale * scale;
      advection_[j] = Complex(0.0, -3.0 * k * scale);
    }
  }

  /// alpha_k(t); Nyquist is held at 1 because its odd-order symbol is zeroed.
  Complex alpha(std::size_t j, double t) const { return std::polar(1.0, -dispersion_[j] * t); }

  Spectrum to_physical_coefficients(std::span<const Complex> g, double t) const {
    Spectrum w(g.begin(), g.end());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] /= alpha(j, t);
    return w;
  }

  Spectrum operator()(double t, const Spectrum& g) const {
    if (g.size() != k_.size()) throw InvalidArgument("kdv rhs: spectrum length mismatch");
    Spectrum u = spectral::ifft(to_physical_coefficients(g, t));
    for (auto& v : u) v *= v;
    Spectrum out = spectral::fft(u);
    if (dealias_) spectral::dealias_two_thirds(out);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= advection_[j] * alpha(j, t);
    if (!ode::all_finite(out)) throw NumericalError("kdv-rhs", "non-finite derivative");
    return out;
  }

  std::size_t size() const noexcept { return k_.size(); }

private:
  bool dealias_;
  std::vector<long> k_;
  std::vector<double> dispersion_;
  std::vector<Complex> advection_;
};

inline Spectrum rhs_spectral(std::span<const Complex> g_hat, double t, const Params& p) {
  return SpectralRhs(p)(t, Spectrum(g_hat.begin(), g_hat.end()));
}

/// Rows are recorded snapshots u(x_j, t_i); row 0 is the initial condition.
struct FieldSnapshots {
  Matrix values;
  std::vector<double> times;
  std::vector<double> grid;
  double max_imaginary_residue = 0.0;

  std::size_t snapshot_count() const noexcept { return values.rows(); }
};

inline constexpr double kImaginaryResidueLimit = 1e-8;

inline FieldSnapshots simulate(const Params& p) {
  p.validate();
  const SpectralRhs rhs(p);
  const std::vector<double> u0 = initial_condition(p);

  std::vector<std::vector<double>> rows{u0};
  std::vector<double> times{0.0};
  double residue_max = 0.0;

  Spectrum g = spectral::fft(std::span<const double>(u0));
  for (std::size_t i = 0; i < p.steps; ++i) {
    const double t = static_cast<double>(i) * p.dt;
    try {
      g = ode::rk4_step(rhs, t, g, p.dt, i + 1);
    } catch (const NumericalError&) {
      throw DivergenceError("kdv", i + 1);
    }
    const std::size_t done = i + 1;
    if (done % p.record_stride != 0 && done != p.steps) continue;

    const double t_next = static_cast<double>(done) * p.dt;
    const Spectrum u = spectral::ifft(rhs.to_physical_coefficients(g, t_next));
    std::vector<double> row(u.size());
    double residue = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      row[j] = u[j].real();
      residue = std::fmax(residue, std::fabs(u[j].imag()));
    }
    if (!(residue < kImaginaryResidueLimit)) {
      throw NumericalError("kdv", "imaginary residue " + std::to_string(residue) +
                                      " at step " + std::to_string(done));
    }
    residue_max = std::fmax(residue_max, residue);
    rows.push_back(std::move(row));
    times.push_back(t_next);
  }

  FieldSnapshots out;
  out.values = Matrix(rows.size(), p.grid);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p.grid; ++j) out.values(i, j) = rows[i][j];
  out.times = std::move(times);
  out.grid = grid_points(p.grid, p.half_length);
  out.max_imaginary_residue = residue_max;
  return out;
}

/// sum_j u_j dz on the mapped [0, 2 pi) grid.
inline double mass(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * 2.0 * std::numbers::pi / static_cast<double>(u.size());
}

/// sum_j u_j^2 dz on the mapped [0, 2 pi) grid.
inline double momentum(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s * 2.0 * std::numbers::pi / static_cast<double>(u.size());
}

}  // namespace phaselens::kdv
