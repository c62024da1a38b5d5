#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "smde/quadrature.hpp"

using smde::integrate;
using smde::integrate_to_infinity;

TEST(Quadrature, Polynomial) {
  const auto r = integrate([](double x) { return x * x * x - 2.0 * x; }, 0.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.0, 1e-13);
}

TEST(Quadrature, Oscillatory) {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(Quadrature, SqrtSingularity) {
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                           {1e-9, 1e-14, 2000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, Kink) {
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-9);
}

TEST(Quadrature, SemiInfinite) {
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-2.0 * x); }, 0.0).value, 0.5,
              1e-12);
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0).value,
              0.5 * std::sqrt(std::numbers::pi), 1e-11);
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x); }, 3.0).value,
              std::exp(-3.0), 1e-13);
}

TEST(Quadrature, ReportsNonConvergence) {
  const auto r = integrate([](double x) { return std::sin(1.0 / x); }, 1e-8, 1.0, {1e-14, 0.0, 5});
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.abs_error, 0.0);
}
