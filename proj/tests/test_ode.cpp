#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "phaselens/lorenz.hpp"
#include "phaselens/ode.hpp"

using phaselens::DivergenceError;
using phaselens::InvalidArgument;
using namespace phaselens::ode;

using Vec = std::vector<double>;

TEST(Rk4Step, ZeroFieldLeavesStateUnchanged) {
  auto zero = [](double, const Vec& y) { return Vec(y.size(), 0.0); };
  EXPECT_EQ(rk4_step(zero, 0.0, Vec{5.0}, 0.1)[0], 5.0);
}

TEST(Rk4Step, ConstantSlope) {
  auto one = [](double, const Vec& y) { return Vec(y.size(), 1.0); };
  EXPECT_DOUBLE_EQ(rk4_step(one, 0.0, Vec{0.0}, 0.25)[0], 0.25);
}

TEST(Rk4Step, ExponentialSingleStepMatchesHandEvaluation) {
  // m1 = 1, m2 = 1.05, m3 = 1.0525, m4 = 1.10525
  auto grow = [](double, const Vec& y) { return y; };
  const double expected = 1.0 + (1.0 + 2 * 1.05 + 2 * 1.0525 + 1.10525) * 0.1 / 6.0;
  EXPECT_NEAR(rk4_step(grow, 0.0, Vec{1.0}, 0.1)[0], expected, 1e-15);
  EXPECT_NEAR(expected, 1.1051708333333333, 1e-15);
}

TEST(Rk4Step, UsesSubstepTimes) {
  // y' = t integrates t^2/2 exactly (Simpson on a quadratic).
  auto ramp = [](double t, const Vec&) { return Vec{t}; };
  EXPECT_NEAR(rk4_step(ramp, 1.0, Vec{0.0}, 0.5)[0], (1.5 * 1.5 - 1.0) / 2.0, 1e-15);
}

TEST(Rk4Step, WorksOnComplexState) {
  using C = std::complex<double>;
  auto rotate = [](double, const std::vector<C>& y) { return std::vector<C>{C(0, 1) * y[0]}; };
  std::vector<C> y{1.0};
  const double h = 0.01;
  for (int i = 0; i < 100; ++i) y = rk4_step(rotate, i * h, y, h);
  EXPECT_NEAR(std::abs(y[0] - std::polar(1.0, 1.0)), 0.0, 1e-9);
}

TEST(Rk4Step, DivergenceReportsStep) {
  auto blow = [](double, const Vec&) { return Vec{std::numeric_limits<double>::infinity()}; };
  try {
    rk4_step(blow, 0.0, Vec{1.0}, 0.1, 42);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 42u);
  }
}

TEST(Rk4Step, LinearInInitialStateForLinearField) {
  auto linear = [](double, const Vec& y) { return Vec{-2.0 * y[0] + y[1], 0.5 * y[0] - y[1]}; };
  const Vec a{0.5, -1.25}, b{2.0, 0.75};
  const Vec sum{a[0] + 3.0 * b[0], a[1] + 3.0 * b[1]};
  const auto ya = rk4_step(linear, 0.0, a, 0.1);
  const auto yb = rk4_step(linear, 0.0, b, 0.1);
  const auto ys = rk4_step(linear, 0.0, sum, 0.1);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(ys[i], ya[i] + 3.0 * yb[i], 1e-14);
}

TEST(Integrate, ZeroStepsReturnsInitialState) {
  auto grow = [](double, const Vec& y) { return y; };
  const auto out = integrate(grow, StepSpec{0.0, 0.1, 0}, Vec{3.0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0][0], 3.0);
}

TEST(Integrate, ExponentialReachesE) {
  auto grow = [](double, const Vec& y) { return y; };
  const auto out = integrate(grow, StepSpec{0.0, 0.1, 10}, Vec{1.0});
  ASSERT_EQ(out.size(), 11u);
  EXPECT_NEAR(out.back()[0], std::numbers::e, 1e-5);
}

TEST(Integrate, ElementIIsIStepsOfRk4) {
  auto grow = [](double, const Vec& y) { return Vec{y[0] * std::cos(y[0])}; };
  const StepSpec spec{0.5, 0.2, 5};
  const auto out = integrate(grow, spec, Vec{1.0});
  Vec y{1.0};
  for (std::size_t i = 0; i < spec.steps; ++i) {
    y = rk4_step(grow, spec.time(i), y, spec.h);
    EXPECT_EQ(out[i + 1][0], y[0]);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  auto grow = [](double, const Vec& y) { return y; };
  const double e1 = std::fabs(integrate(grow, StepSpec{0.0, 0.1, 10}, Vec{1.0}).back()[0] - std::numbers::e);
  const double e2 = std::fabs(integrate(grow, StepSpec{0.0, 0.05, 20}, Vec{1.0}).back()[0] - std::numbers::e);
  EXPECT_GE(e1 / e2, 14.0);
  EXPECT_LE(e1 / e2, 18.0);
}

TEST(Integrate, LorenzStaysBounded) {
  const auto traj = integrate(phaselens::lorenz::vector_field({}), StepSpec{0.0, 0.01, 5000},
                              std::array<double, 3>{0.0, 1.0, 0.0});
  for (const auto& s : traj)
    for (double v : s) ASSERT_LT(std::fabs(v), 100.0);
}

TEST(Integrate, Deterministic) {
  const auto f = phaselens::lorenz::vector_field({});
  const StepSpec spec{0.0, 0.01, 2000};
  const std::array<double, 3> y0{0.0, 1.0, 0.0};
  EXPECT_EQ(integrate(f, spec, y0), integrate(f, spec, y0));
}

TEST(Integrate, RejectsBadSpec) {
  auto grow = [](double, const Vec& y) { return y; };
  EXPECT_THROW(integrate(grow, StepSpec{0.0, 0.0, 3}, Vec{1.0}), InvalidArgument);
  EXPECT_THROW(integrate(grow, StepSpec{0.0, -0.1, 3}, Vec{1.0}), InvalidArgument);
  EXPECT_THROW(integrate(grow, StepSpec{0.0, 0.1, 3}, Vec{std::nan("")}), InvalidArgument);
}

TEST(Integrate, DivergenceCarriesStepIndex) {
  auto blowup = [](double, const Vec& y) { return Vec{y[0] * y[0]}; };
  try {
    integrate(blowup, StepSpec{0.0, 0.5, 200}, Vec{1.0});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 1u);
    EXPECT_LE(e.step(), 200u);
  }
}
