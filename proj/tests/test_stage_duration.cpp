#include <gtest/gtest.h>

#include <cmath>

#include "sdg/instances.hpp"
#include "sdg/stage_duration.hpp"

using namespace sdg;

namespace {

PartitionSignalGame symmetric_kernel(double rate) {
  PartitionSignalGame q =
      PartitionSignalGame::create({"a", "b"}, {"s"}, {0, 0}, {{"x"}}, {{"y"}}, DynamicsKind::kKernel);
  q.row(0, 0, 0)[0] = -rate;
  q.row(0, 0, 0)[1] = rate;
  q.row(1, 0, 0)[0] = rate;
  q.row(1, 0, 0)[1] = -rate;
  return q;
}

}  // namespace

TEST(MaxStep, Examples) {
  EXPECT_DOUBLE_EQ(*max_step(symmetric_kernel(2.0)), 0.5);
  EXPECT_FALSE(max_step(symmetric_kernel(0.0)).has_value());
  EXPECT_DOUBLE_EQ(*max_step(build_g1()), 1.0);
}

TEST(EulerTransform, QuitFromMinusMinus) {
  const double h = 0.25;
  const PartitionSignalGame g = euler_transform(build_g1(), h);
  const auto row = g.row(g1_state::kMinusMinus, 2, 0);  // (Q, L)
  EXPECT_DOUBLE_EQ(row[g1_state::kMinusMinus], 1.0 - h);
  EXPECT_DOUBLE_EQ(row[g1_state::kMinusStar], h);
  EXPECT_DOUBLE_EQ(g.g(g1_state::kMinusMinus, 2, 0), -h);
}

TEST(EulerTransform, UnitStepIsTheOriginalTables) {
  const PartitionSignalGame g = euler_transform(build_g1(), 1.0);
  const auto row = g.row(g1_state::kMinusMinus, 0, 0);
  EXPECT_DOUBLE_EQ(row[g1_state::kMinusMinus], 0.5);
  EXPECT_DOUBLE_EQ(row[g1_state::kMinus], 0.5);
  EXPECT_EQ(g, kernel_to_transition(build_g1(), 1.0));
}

TEST(EulerTransform, ZeroKernel) {
  PartitionSignalGame q = symmetric_kernel(0.0);
  q.g(0, 0, 0) = 3.0;
  const PartitionSignalGame g = euler_transform(q, 0.1);
  EXPECT_EQ(g.row(0, 0, 0)[0], 1.0);
  EXPECT_EQ(g.row(1, 0, 0)[1], 1.0);
  EXPECT_DOUBLE_EQ(g.g(0, 0, 0), 0.3);
}

TEST(SignalAugmentedTransform, UnitStepAddsUnusedSignal) {
  const GeneralSignalGame g = build_g1_tilde();
  const GeneralSignalGame t = signal_augmented_transform(g, 1.0);
  EXPECT_EQ(t.num_signals(), g.num_signals() + 1);
  EXPECT_EQ(t.transitions, g.transitions);
  EXPECT_EQ(t.payoff, g.payoff);
}

TEST(SignalAugmentedTransform, DirectFormula) {
  GeneralSignalGame g = GeneralSignalGame::create({"a", "b"}, {"alpha"}, {"x"}, {"y"});
  g.outcomes(0, 0, 0) = {{1, 0, 0.5}, {0, 0, 0.5}};
  g.outcomes(1, 0, 0) = {{1, 0, 1.0}};
  const GeneralSignalGame t = signal_augmented_transform(g, 0.2);
  const auto& outs = t.outcomes(0, 0, 0);
  ASSERT_EQ(outs.size(), 3u);
  EXPECT_DOUBLE_EQ(outs[0].prob, 0.1);
  EXPECT_EQ(outs[0].state, 1u);
  EXPECT_DOUBLE_EQ(outs[1].prob, 0.1);
  EXPECT_EQ(outs[2].state, 0u);
  EXPECT_EQ(outs[2].signal, 1u);
  EXPECT_DOUBLE_EQ(outs[2].prob, 0.8);
  EXPECT_TRUE(validate(t).ok());
  EXPECT_TRUE(validate(signal_augmented_transform(build_g1_tilde(), 0.3)).ok());
}

TEST(ExpTransform, SymmetricTwoStateClosedForm) {
  for (double h : {1e-3, 0.1, 0.7, 3.0}) {
    const StageModel<PartitionSignalGame> m = exp_transform(symmetric_kernel(1.0), h, 0.4);
    const double e = std::exp(-2.0 * h);
    EXPECT_NEAR(m.game.row(0, 0, 0)[0], (1 + e) / 2, 1e-14);
    EXPECT_NEAR(m.game.row(0, 0, 0)[1], (1 - e) / 2, 1e-14);
    EXPECT_NEAR(m.game.row(1, 0, 0)[0], (1 - e) / 2, 1e-14);
    EXPECT_NEAR(m.discount.continuation, std::exp(-0.4 * h), 1e-15);
    EXPECT_NEAR(m.discount.payoff_weight, 1.0 - std::exp(-0.4 * h), 1e-15);
  }
}

TEST(ExpTransform, FirstOrderAgreesWithEuler) {
  const double h = 1e-4;
  const PartitionSignalGame q = build_half(Side::kPlus, 0.0);
  const PartitionSignalGame ex = exp_transform_game(q, h);
  const PartitionSignalGame eu = kernel_to_transition(q, h);
  double worst = 0.0;
  for (std::size_t w = 0; w < q.num_states(); ++w)
    for (std::size_t k = 0; k < ex.dynamics[w].size(); ++k)
      worst = std::max(worst, std::abs(ex.dynamics[w][k] - eu.dynamics[w][k]));
  EXPECT_LE(worst, 1e-7);
}

TEST(ExpTransform, ZeroKernelIsIdentity) {
  const PartitionSignalGame p = exp_transform_game(symmetric_kernel(0.0), 0.9);
  EXPECT_EQ(p.row(0, 0, 0)[0], 1.0);
  EXPECT_EQ(p.row(0, 0, 0)[1], 0.0);
}

TEST(ExpTransform, RowsAreStochastic) {
  for (Side s : {Side::kMinus, Side::kPlus}) {
    const PartitionSignalGame p = exp_transform_game(build_half(s, 0.0), 0.37);
    EXPECT_TRUE(validate(p).ok());
  }
}

TEST(MatrixExp, SemigroupProperty) {
  const std::vector<double> a{-1.0, 0.6, 0.4, 0.2, -0.5, 0.3, 0.0, 0.9, -0.9};
  std::vector<double> two(a);
  for (double& x : two) x *= 2.0;
  const std::vector<double> e1 = matrix_exp(a, 3), e2 = matrix_exp(two, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += e1[r * 3 + k] * e1[k * 3 + c];
      EXPECT_NEAR(s, e2[r * 3 + c], 1e-14);
    }
}

TEST(StageWeights, SumToOneMinusSurvival) {
  const StageSchedule s = StageSchedule::make({1.0, 0.5, 0.25}, 0.1);
  const double lambda = 0.3;
  const std::vector<double> w = stage_weights(lambda, s, 200);
  double sum = 0.0, survive = 1.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    sum += w[n];
    survive *= 1.0 - lambda * s.at(n);
  }
  EXPECT_NEAR(sum, 1.0 - survive, 1e-14);
  EXPECT_DOUBLE_EQ(w[0], 0.3);
  EXPECT_DOUBLE_EQ(w[1], 0.3 * 0.5 * 0.7);
}

TEST(StageWeights, RejectsNonContraction) {
  EXPECT_THROW(stage_weights(2.0, StageSchedule::uniform(1.0), 3), Error);
  EXPECT_THROW(StageSchedule::make({1.0, -0.5}, 0.1), Error);
  EXPECT_THROW(euler_stage(build_g1(), 1.0, 1.0), Error);
}
