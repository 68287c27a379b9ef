#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle/closed_forms.hpp"
#include "triwave/fiber.hpp"

using namespace triwave;

TEST(Fiber, TrivialRoot) { EXPECT_DOUBLE_EQ(fiber_maximizer({1.0, 1.0, 0.0, 3.0}), 1.0); }

TEST(Fiber, QuadraticOracle) {
  for (double c : {0.1, -0.1, 2.0, -2.0, 1e-6, 1e3}) {
    const FiberCoefficients k{1.0, 1.0, c, 3.0};
    const double expect = oracle::fiber_root_p3(1.0, 1.0, c);
    EXPECT_NEAR(fiber_maximizer(k), expect, 1e-14 * expect) << "C=" << c;
  }
  EXPECT_NEAR(fiber_maximizer({1.0, 1.0, 0.1, 3.0}), 0.8611874208, 1e-10);
  EXPECT_NEAR(fiber_maximizer({1.0, 1.0, -0.1, 3.0}), 1.1611874208, 1e-10);
}

TEST(Fiber, ClosedFormWithoutCoupling) {
  for (double p : {2.5, 3.0, 4.0, 7.0}) {
    const FiberCoefficients k{3.0, 0.7, 0.0, p};
    EXPECT_NEAR(fiber_maximizer(k), std::pow(3.0 / 0.7, 1.0 / (p - 1.0)), 1e-15 * fiber_maximizer(k));
  }
}

TEST(Fiber, ProjectionPropertiesRandom) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> loga(-3.0, 3.0), sign(-1.0, 1.0), pexp(2.1, 6.0);
  for (int n = 0; n < 300; ++n) {
    const FiberCoefficients k{std::pow(10.0, loga(rng)), std::pow(10.0, loga(rng)),
                              sign(rng) * std::pow(10.0, loga(rng)), pexp(rng)};
    const double t = fiber_maximizer(k);
    const double scale = k.a + k.b * std::pow(t, k.p - 1.0) + 3.0 * std::abs(k.c) * t;
    EXPECT_LE(std::abs(fiber_balance(t, k)), 1e-12 * scale);
    EXPECT_LT(fiber_second_derivative(t, k), 0.0);
    const double ft = fiber_value(t, k);
    EXPECT_GT(ft, 0.0);
    for (double r : {0.5, 0.9, 0.999, 1.001, 1.1, 2.0}) EXPECT_LE(fiber_value(r * t, k), ft * (1.0 + 1e-14));
  }
}

TEST(Fiber, LogMaximizerHandlesExtremeScales) {
  // Root near 1e200: A = B t^(p-1) + 3 C t with C < 0 dominating.
  const FiberCoefficients k{1.0, 1e-300, -1e-3, 2.5};
  const double s = fiber_log_maximizer(k);
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_NEAR(detail::log_balance(s, k), 0.0, 1e-12);
}

TEST(Fiber, ErrorsAndDomain) {
  EXPECT_THROW(fiber_maximizer({0.0, 1.0, 0.0, 3.0}), InvalidArgument);
  EXPECT_THROW(fiber_maximizer({1.0, -1.0, 0.0, 3.0}), InvalidArgument);
  EXPECT_THROW(fiber_maximizer({1.0, 1.0, 0.0, 2.0}), InvalidArgument);
  EXPECT_THROW(fiber_value(-1.0, {1.0, 1.0, 0.0, 3.0}), InvalidArgument);
  EXPECT_THROW(fiber_maximizer({1e-300, 1e300, 0.0, 2.001}), IllConditioned);
}

TEST(Fiber, LowerBoundAtZeroAndDecayAtInfinity) {
  const FiberCoefficients k{2.0, 1.0, -0.5, 3.0};
  EXPECT_EQ(fiber_value(0.0, k), 0.0);
  EXPECT_GT(fiber_value(1e-3, k), 0.0);
  EXPECT_LT(fiber_value(1e3, k), 0.0);
}
