#pragma once

// Fixed-step classical Runge-Kutta integration over real or complex state vectors.

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "phaselens/error.hpp"

namespace phaselens::ode {

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
bool finite(const T& v) {
  if constexpr (is_complex<T>::value) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

}  // namespace detail

/// Any indexable container of doubles or std::complex<double>:
/// std::vector, std::array, etc.
template <class S>
concept State = requires(S s, const S cs, std::size_t i) {
  typename S::value_type;
  { cs.size() } -> std::convertible_to<std::size_t>;
  { s[i] } -> std::convertible_to<typename S::value_type>;
} && (std::floating_point<typename S::value_type> ||
      detail::is_complex<typename S::value_type>::value);

template <class F, class S>
concept VectorField = State<S> && std::invocable<F&, double, const S&> &&
                      std::convertible_to<std::invoke_result_t<F&, double, const S&>, S>;

template <State S>
bool all_finite(const S& y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!detail::finite(y[i])) return false;
  return true;
}

struct StepSpec {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t steps = 0;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw InvalidArgument("step size h must be positive and finite");
    }
    if (!std::isfinite(t0)) throw InvalidArgument("t0 must be finite");
  }

  /// Time of step i, computed directly rather than by accumulation.
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * h; }
};

/// One classical RK4 step. `step_index` only labels a divergence error.
template <State S, VectorField<S> F>
S rk4_step(F&& rhs, double t, const S& y, double h, std::size_t step_index = 0) {
  const auto checked = [&](S m) {
    if (m.size() != y.size()) {
      throw InvalidArgument("rk4: right-hand side changed the state dimension");
    }
    if (!all_finite(m)) throw DivergenceError("rk4", step_index);
    return m;
  };
  const std::size_t n = y.size();
  const double half = h / 2.0;

  const S m1 = checked(rhs(t, y));
  S probe = y;
  for (std::size_t i = 0; i < n; ++i) probe[i] = y[i] + m1[i] * half;
  const S m2 = checked(rhs(t + half, std::as_const(probe)));
  for (std::size_t i = 0; i < n; ++i) probe[i] = y[i] + m2[i] * half;
  const S m3 = checked(rhs(t + half, std::as_const(probe)));
  for (std::size_t i = 0; i < n; ++i) probe[i] = y[i] + m3[i] * h;
  const S m4 = checked(rhs(t + h, std::as_const(probe)));

  S next = y;
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = y[i] + (m1[i] + 2.0 * m2[i] + 2.0 * m3[i] + m4[i]) * (h / 6.0);
  }
  if (!all_finite(next)) throw DivergenceError("rk4", step_index);
  return next;
}

/// Returns steps+1 states; element 0 is y0.
template <State S, VectorField<S> F>
std::vector<S> integrate(F&& rhs, const StepSpec& spec, const S& y0) {
  spec.validate();
  if (!all_finite(y0)) throw InvalidArgument("integrate: initial state is not finite");
  std::vector<S> out;
  out.reserve(spec.steps + 1);
  out.push_back(y0);
  for (std::size_t i = 0; i < spec.steps; ++i) {
    out.push_back(rk4_step(rhs, spec.time(i), out.back(), spec.h, i + 1));
  }
  return out;
}

}  // namespace phaselens::ode
