#include <gtest/gtest.h>

#include "sdg/closed_form.hpp"
#include "sdg/instances.hpp"
#include "sdg/reduced.hpp"
#include "sdg/solver.hpp"

using namespace sdg;

TEST(ReducedBackup, MinusAgainstConstantMinusOne) {
  const double lambda = 0.3, h = 0.2;
  const auto v = [](double) { return -1.0; };
  for (double p : {0.0, 0.35, 1.0}) {
    const double expect = -lambda * h - (1 - lambda * h) * (1 - h + h * p);
    EXPECT_NEAR(reduced_backup(Side::kMinus, p, v, lambda, h, 0.0), expect, 1e-15);
  }
}

TEST(ReducedBackup, PlusAtZero) {
  const auto v = [](double) { return 0.0; };
  EXPECT_NEAR(reduced_backup(Side::kPlus, 0.0, v, 0.4, 0.5, 0.0), 0.2, 1e-15);
}

// The reduced recursion is the Shapley backup of the general-signal half game
// restricted to beliefs on the two transient states.
TEST(ReducedBackup, MatchesShapleyBackupOfGeneralHalfGame) {
  for (Side side : {Side::kMinus, Side::kPlus})
    for (double h : {0.1, 0.5, 1.0}) {
      const double lambda = 0.3;
      const auto m = discounted_stage(build_tilde_half(side, h), lambda, h);
      const auto line = [](double p) { return 0.3 * p * p - 0.5 * p + 0.1; };
      const double star = side == Side::kMinus ? -1.0 : 1.0;
      const auto on_beliefs = [&](const Belief& b) {
        const double mass = b[0] + b[1];
        return b[2] * star + (mass > 0 ? mass * line(b[1] / mass) : 0.0);
      };
      for (double p : {0.0, 0.2, 0.6, 1.0}) {
        const double red = reduced_backup(side, p, line, lambda, h, 0.0);
        const double full = shapley_backup(m, Belief({1 - p, p, 0, 0}), on_beliefs).value;
        EXPECT_NEAR(red, full, 1e-13) << to_string(side) << " h=" << h << " p=" << p;
      }
    }
}

TEST(SolveReduced, MinusLowerBranch) {
  const double lambda = 0.05;
  const LineValueFn f = solve_reduced(Side::kMinus, lambda, 1e-3, 0.0);
  EXPECT_NEAR(f(0.5), -(0.5 + lambda) / (1 + lambda), 5e-3);
  EXPECT_NEAR(f(1.0), w(Side::kMinus, lambda, 1.0), 5e-3);
}

TEST(SolveReduced, PlusAtOne) {
  const LineValueFn f = solve_reduced(Side::kPlus, 0.05, 1e-3, 0.0);
  EXPECT_NEAR(f(1.0), w(Side::kPlus, 0.05, 1.0), 5e-3);
}

// As h shrinks the quit region of the fixed point approaches the threshold.
TEST(SolveReduced, SwitchPointApproachesThreshold) {
  const double lambda = 0.2, h = 1e-3;
  const LineValueFn f = solve_reduced(Side::kMinus, lambda, h, 0.0);
  const auto v = [&](double p) { return f(p); };
  double last_quit = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double p = k / 2000.0;
    const double quit = -h * p + (1 - h) * v(p);
    const double cont = 0.5 * v(p - h * p / 2) + 0.5 * v(p + h - h * p);
    if (quit >= cont) last_quit = p;
  }
  EXPECT_NEAR(last_quit, threshold(Side::kMinus, lambda), 0.02);
}

TEST(SolveReduced, AffineInExitPayoff) {
  const double lambda = 0.2, h = 0.01;
  const LineValueFn base = solve_reduced(Side::kMinus, lambda, h, 0.0);
  for (double k : {-1.0, 0.5, 1.0}) {
    const LineValueFn f = solve_reduced(Side::kMinus, lambda, h, k);
    for (double p : {0.0, 0.3, 0.8, 1.0})
      EXPECT_NEAR(f(p), affine_extend(Side::kMinus, base(p), k), 1e-7 + f.error_bound + base.error_bound);
  }
  const LineValueFn stuck = solve_reduced(Side::kMinus, lambda, h, -1.0);
  for (double p : {0.0, 0.5, 1.0}) EXPECT_NEAR(stuck(p), -1.0, 1e-9);
}

TEST(SolveReduced, ConvergesToClosedFormAsStepShrinks) {
  for (Side side : {Side::kMinus, Side::kPlus}) {
    double prev = 1.0;
    for (double h : {1e-1, 1e-2, 1e-3}) {
      const LineValueFn f = solve_reduced(side, 0.2, h, 0.0);
      double e = 0.0;
      for (int k = 0; k <= 20; ++k) e = std::max(e, std::abs(f(k / 20.0) - w(side, 0.2, k / 20.0)));
      EXPECT_LT(e, prev);
      prev = e;
    }
  }
}

TEST(Coupled, MatchesClosedCombination) {
  const CoupledResult c = solve_coupled_g1(0.1, 0.01);
  EXPECT_NEAR(c.v_plus, c.closed.v_plus, 1e-7);
  EXPECT_NEAR(c.v_minus, c.closed.v_minus, 1e-7);
  EXPECT_NEAR(g1_value(c, Belief::point(6, g1_state::kPlusPlus)), c.v_plus, 1e-12);
  EXPECT_EQ(g1_value(c, Belief::point(6, g1_state::kMinusStar)), -1.0);
}

TEST(Coupled, UnitStepMatchesTreeOnTheTwoSidedExample) {
  for (double lambda : {0.5, 0.2}) {
    const CoupledResult c = solve_coupled_g1(lambda, 1.0);
    const auto m = make_stage(build_g1(), lambda, 1.0);
    for (std::size_t s : {g1_state::kMinusMinus, g1_state::kPlusPlus}) {
      const TreeResult t = solve_tree(m, Belief::point(6, s), TreeOptions{1e-10});
      EXPECT_NEAR(g1_value(c, Belief::point(6, s)), t.value, 1e-8);
    }
  }
}

TEST(BlindLine, EulerHalfGameMatchesReducedRecursion) {
  const double lambda = 0.3, h = 0.05;
  const auto m = euler_stage(build_half(Side::kMinus, 0.0), lambda, h);
  const BlindLine line = solve_blind_line(m, half_state::kOne, half_state::kTwo, 2000);
  const LineValueFn red = solve_reduced(Side::kMinus, lambda, h, 0.0, {2000});
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(line.fn(k / 10.0), red(k / 10.0), 1e-9);
  EXPECT_NEAR(line(Belief({0, 0, 1, 0})), -1.0, 1e-12);
}

TEST(Reduced, RejectsBadArguments) {
  EXPECT_THROW(solve_reduced(Side::kMinus, 0.2, 0.0, 0.0), Error);
  EXPECT_THROW(solve_reduced(Side::kMinus, 0.2, 0.1, 2.0), Error);
  EXPECT_THROW(reduced_backup(Side::kPlus, 1.5, [](double) { return 0.0; }, 0.2, 0.1, 0.0), Error);
}
