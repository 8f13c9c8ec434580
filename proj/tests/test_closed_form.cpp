#include <gtest/gtest.h>

#include <cmath>

#include "sdg/closed_form.hpp"

using namespace sdg;

TEST(Threshold, Examples) {
  EXPECT_DOUBLE_EQ(threshold(Side::kMinus, 0.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(threshold(Side::kPlus, 0.0), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(threshold(Side::kMinus, 1.0), 6.0 / 7.0);
}

TEST(W, LowerBranchAndBoundary) {
  EXPECT_DOUBLE_EQ(w(Side::kMinus, 1.0, 0.0), -0.5);
  EXPECT_DOUBLE_EQ(w(Side::kPlus, 1.0, 0.0), 0.5);
  EXPECT_THROW(w(Side::kMinus, 0.1, 1.5), Error);
  EXPECT_THROW(w(Side::kMinus, 0.0, 0.5), Error);
}

TEST(W, UpperBranchAtOneMatchesExplicitFormula) {
  for (double lambda : {0.01, 0.05, 0.3, 2.0}) {
    const double e = 4 * lambda / 3;
    const double expect = -1 + std::pow(4 * lambda, e) / ((1 + lambda) * std::pow(3 + 4 * lambda, 1 + e));
    EXPECT_NEAR(w(Side::kMinus, lambda, 1.0), expect, 1e-15);
  }
}

TEST(W, SmallLambdaLimitsAtOne) {
  EXPECT_NEAR(w(Side::kMinus, 1e-9, 1.0), -2.0 / 3.0, 1e-6);
  EXPECT_NEAR(w(Side::kPlus, 1e-9, 1.0), 3.0 / 4.0, 1e-6);
  EXPECT_NEAR(w_limit(Side::kMinus, 1.0), -2.0 / 3.0, 0.0);
  EXPECT_NEAR(w_limit(Side::kPlus, 0.5), 0.5, 0.0);
}

TEST(W, ContinuousAtThreshold) {
  for (Side s : {Side::kMinus, Side::kPlus})
    for (double lambda : {0.01, 0.1, 1.0, 5.0}) {
      const double t = threshold(s, lambda);
      const double below = (s == Side::kMinus ? -1.0 : 1.0) * (t + lambda) / (1 + lambda);
      EXPECT_NEAR(w(s, lambda, t), below, 1e-12);
    }
}

TEST(WDerivative, Examples) {
  const double lambda = 0.2;
  EXPECT_DOUBLE_EQ(w_derivative(Side::kMinus, lambda, 0.3).left, -1.0 / 1.2);
  const auto at = w_derivative(Side::kMinus, lambda, threshold(Side::kMinus, lambda));
  EXPECT_NEAR(at.left, -1.0 / 1.2, 1e-12);
  EXPECT_NEAR(at.right, -1.0 / 1.2, 1e-12);
}

TEST(WDerivative, MatchesCentralDifferences) {
  const double step = 1e-6;
  for (Side s : {Side::kMinus, Side::kPlus})
    for (double p : {0.2, 0.5, 0.9, 0.97}) {
      const double fd = (w(s, 0.1, p + step) - w(s, 0.1, p - step)) / (2 * step);
      EXPECT_NEAR(w_derivative(s, 0.1, p).right, fd, 1e-7) << to_string(s) << " p=" << p;
    }
}

TEST(AffineExtend, Examples) {
  EXPECT_DOUBLE_EQ(affine_extend(Side::kMinus, -0.3, 0.0), -0.3);
  EXPECT_NEAR(affine_extend(Side::kMinus, -2.0 / 3.0, 7.0 / 11.0), -5.0 / 11.0, 1e-15);
  EXPECT_NEAR(affine_extend(Side::kPlus, 3.0 / 4.0, -5.0 / 11.0), 7.0 / 11.0, 1e-15);
  EXPECT_DOUBLE_EQ(affine_extend(Side::kMinus, -0.4, -1.0), -1.0);
}

TEST(Combine, Examples) {
  const CombinedValues c = combine_half_values(-2.0 / 3.0, 3.0 / 4.0);
  EXPECT_NEAR(c.v_plus, 7.0 / 11.0, 1e-15);
  EXPECT_NEAR(c.v_minus, -5.0 / 11.0, 1e-15);
  const CombinedValues d = combine_half_values(-1.0, 1.0);
  EXPECT_NEAR(d.v_plus, 1.0, 1e-15);
  EXPECT_NEAR(d.v_minus, -1.0, 1e-15);
  try {
    combine_half_values(0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(Combine, SolvesTheCouplingEquations) {
  for (double vm : {-0.9, -0.6, -0.2})
    for (double vp : {0.1, 0.5, 0.8}) {
      const CombinedValues c = combine_half_values(vm, vp);
      EXPECT_NEAR(affine_extend(Side::kPlus, vp, c.v_minus), c.v_plus, 1e-13);
      EXPECT_NEAR(affine_extend(Side::kMinus, vm, c.v_plus), c.v_minus, 1e-13);
    }
}

TEST(LimitValue, Examples) {
  EXPECT_NEAR(limit_value(Belief::point(6, 1)), 7.0 / 11.0, 1e-15);
  EXPECT_NEAR(limit_value(Belief::point(6, 4)), -5.0 / 11.0, 1e-15);
  EXPECT_EQ(limit_value(Belief::point(6, 2)), 1.0);
  EXPECT_EQ(limit_value(Belief::point(6, 5)), -1.0);
  EXPECT_NEAR(limit_value(Belief::point(6, 0)), -5.0 / 11.0, 1e-15);
  EXPECT_NEAR(limit_value(Belief::point(6, 3)), 7.0 / 11.0, 1e-15);
}

// Each side of the limit is the combined constant extended through the
// half-game limit: mass * (affine_extend(w_limit(share), k)).
TEST(LimitValue, AgreesWithHalfGameLimits) {
  const double vp = 7.0 / 11.0, vm = -5.0 / 11.0;
  for (double a : {0.0, 0.2, 0.5, 0.7, 0.8, 1.0})
    for (double b : {0.0, 0.3, 0.6, 0.7, 1.0}) {
      const double mp = 0.5, mm = 0.4;
      const Belief p({mp * (1 - a), mp * a, 0.06, mm * (1 - b), mm * b, 0.04});
      const double expect = 0.06 - 0.04 + mp * affine_extend(Side::kPlus, w_limit(Side::kPlus, a), vm) +
                            mm * affine_extend(Side::kMinus, w_limit(Side::kMinus, b), vp);
      EXPECT_NEAR(limit_value(p), expect, 1e-14) << a << " " << b;
    }
}

TEST(PdeResidual, ExplicitSolutionsAreClassical) {
  for (Side s : {Side::kMinus, Side::kPlus}) {
    const ValueWithGradient f = wbar(s, 0.1);
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i)
      for (int j = 1; j <= 50; ++j) {
        const double p1 = i / 51.0, p2 = j / 51.0;
        if (p1 + p2 >= 1.0) continue;
        worst = std::max(worst, std::abs(pde_residual(s, 0.1, p1, p2, f)));
      }
    EXPECT_LE(worst, 1e-8) << to_string(s);
  }
}

TEST(PdeResidual, ConstantFunctionByHand) {
  const double c = 0.3, lambda = 0.2, p1 = 0.25, p2 = 0.35;
  ValueWithGradient f;
  f.value = [c](double, double) { return c; };
  f.gradient = [](double, double) { return std::optional<std::array<double, 2>>(std::array<double, 2>{0.0, 0.0}); };
  // Rows T, B earn -lambda (p1 + p2); the quit row adds the drift p2 into -*,
  // worth -1 per unit. Player 1 maximizes.
  const double quit = -lambda * (p1 + p2) - p2, stay = -lambda * (p1 + p2);
  EXPECT_NEAR(pde_residual(Side::kMinus, lambda, p1, p2, f), lambda * c - std::max(quit, stay), 1e-15);
}

TEST(PdeResidual, MissingGradient) {
  ValueWithGradient f;
  f.value = [](double, double) { return 0.0; };
  EXPECT_THROW(pde_residual(Side::kMinus, 0.1, 0.2, 0.2, f), Error);
}
