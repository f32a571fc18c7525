#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "phaselens/error.hpp"
#include "phaselens/ode.hpp"

namespace phaselens::lorenz {

struct Params {
  double sigma = 10.0;     // Prandtl number
  double r = 28.0;         // Rayleigh number
  double b = 8.0 / 3.0;    // region-size parameter

  void validate() const {
    if (!(sigma > 0.0) || !(b > 0.0) || !std::isfinite(sigma) || !std::isfinite(b) ||
        !std::isfinite(r)) {
      throw InvalidArgument("lorenz: sigma and b must be positive, all parameters finite");
    }
  }
};

struct State {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  std::array<double, 3> to_array() const { return {x, y, z}; }
  static State from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
  double max_norm() const { return std::fmax(std::fabs(x), std::fmax(std::fabs(y), std::fabs(z))); }

  friend bool operator==(const State&, const State&) = default;
};

inline State rhs(const Params& p, const State& s) {
  return {p.sigma * (s.y - s.x), p.r * s.x - s.y - s.x * s.z, s.x * s.y - p.b * s.z};
}

/// Autonomous vector field in the form ode::integrate expects.
inline auto vector_field(const Params& p) {
  return [p](double, const std::array<double, 3>& y) {
    return rhs(p, State::from_array(y)).to_array();
  };
}

/// Origin first; the symmetric pair follows when r > 1.
inline std::vector<State> fixed_points(const Params& p) {
  if (!(p.b > 0.0)) throw InvalidArgument("lorenz: b must be positive");
  std::vector<State> out{{0.0, 0.0, 0.0}};
  if (p.r > 1.0) {
    const double c = std::sqrt(p.b * (p.r - 1.0));
    out.push_back({c, c, p.r - 1.0});
    out.push_back({-c, -c, p.r - 1.0});
  }
  return out;
}

/// The (x, y) -> (-x, -y) symmetry of the equations.
inline State symmetry_image(const State& s) { return {-s.x, -s.y, s.z}; }

inline std::vector<State> trajectory(const Params& p, const State& initial,
                                     const ode::StepSpec& spec) {
  p.validate();
  const auto raw = ode::integrate(vector_field(p), spec, initial.to_array());
  std::vector<State> out;
  out.reserve(raw.size());
  for (const auto& a : raw) out.push_back(State::from_array(a));
  return out;
}

}  // namespace phaselens::lorenz
