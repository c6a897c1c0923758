#include <cmath>

#include <gtest/gtest.h>

#include "pilotq/errors.hpp"
#include "pilotq/linalg.hpp"
#include "pilotq/quadrature.hpp"

using namespace pilotq;

TEST(Quadrature, ModeNormalisation) {
  const QuadratureRule rule;
  for (int n = 1; n <= 4; ++n) {
    const double v = integrate_checked(
        rule, [n](double x) { return 2.0 * std::pow(std::sin(n * kPi * x), 2); }, 0.0, 1.0);
    EXPECT_NEAR(v, 1.0, 1e-13);
  }
}

TEST(Quadrature, PolynomialExactness) {
  // A single panel of order q integrates degree 2q - 1 exactly.
  for (int q = 2; q <= 8; ++q) {
    const QuadratureRule rule(1, q);
    const int deg = 2 * q - 1;
    const double v = rule.integrate([deg](double x) { return std::pow(x, deg); }, -1.0, 2.0);
    const double exact = (std::pow(2.0, deg + 1) - 1.0) / (deg + 1);
    EXPECT_NEAR(v, exact, 1e-11 * std::abs(exact)) << q;
  }
}

TEST(Quadrature, WeightsSumToTwo) {
  for (int q = 1; q <= 10; ++q) {
    const QuadratureRule rule(1, q);
    double s = 0.0;
    for (double w : rule.weights()) s += w;
    EXPECT_NEAR(s, 2.0, 1e-14);
    EXPECT_EQ(rule.nodes().size(), static_cast<std::size_t>(q));
  }
}

TEST(Quadrature, CoarseRuleIsRejected) {
  const QuadratureRule coarse(2, 2, 1e-12);
  EXPECT_THROW(integrate_checked(coarse, [](double x) { return std::sin(40.0 * x); }, 0.0, 1.0),
               QuadratureError);
  EXPECT_THROW(QuadratureRule(0, 4), InvalidArgument);
}
