#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace phaselens {

/// Bad input to an operation: out-of-range window, wrong length, malformed config.
/// The CLI maps these to exit code 1.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that started from valid input but could not finish.
/// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

/// Non-finite state produced during time stepping.
class DivergenceError : public NumericalError {
public:
  DivergenceError(std::string stage, std::size_t step)
      : NumericalError(std::move(stage),
                       "non-finite value at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// Raised by the Jacobi iterations when the sweep cap is hit.
class ConvergenceError : public NumericalError {
public:
  ConvergenceError(std::string stage, double residual)
      : NumericalError(std::move(stage),
                       "no convergence, residual " + std::to_string(residual)),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// File read/write failure; the message carries the path.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace phaselens
