#include <gtest/gtest.h>

#include <random>

#include "sdg/belief.hpp"
#include "sdg/instances.hpp"
#include "sdg/stage_duration.hpp"

using namespace sdg;

TEST(BeliefType, ClampsDustAndRejectsGarbage) {
  const Belief p({0.5, 0.5 + 1e-15, -1e-15});
  EXPECT_EQ(p[2], 0.0);
  EXPECT_THROW(Belief({0.5, 0.6}), Error);
  EXPECT_THROW(Belief({1.1, -0.1}), Error);
  EXPECT_THROW(Belief(std::vector<double>{}), Error);
}

TEST(ExpectedPayoff, SidesOfTheTwoSidedExample) {
  const PartitionSignalGame g = euler_transform(build_g1(), 1.0);
  const Belief plus({0.3, 0.6, 0.1, 0, 0, 0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(expected_payoff(g, plus, i, j), 1.0);
  EXPECT_DOUBLE_EQ(expected_payoff(g, Belief::point(6, g1_state::kMinusMinus), 1, 1), -1.0);
  const GeneralSignalGame gt = build_g1_tilde();
  EXPECT_DOUBLE_EQ(expected_payoff(gt, Belief({0.5, 0.5, 0, 0, 0, 0}), 0, 1), 1.0);
}

TEST(ExpectedPayoff, InadmissibleProfile) {
  const PartitionSignalGame g = euler_transform(build_g1(), 1.0);
  // MINUS offers 2 columns; column 3 exists only on the PLUS side.
  EXPECT_THROW(expected_payoff(g, Belief::point(6, g1_state::kMinus), 0, 3), Error);
}

TEST(Branch, TwoSidedGeneralFormUnderC) {
  const GeneralSignalGame g = build_g1_tilde();
  const double p = 0.4;
  std::vector<double> w(6, 0.0);
  w[g1_state::kMinus] = 1 - p;
  w[g1_state::kMinusMinus] = p;
  const auto br = branch(g, Belief(w), 0, 0);
  ASSERT_EQ(br.size(), 2u);
  EXPECT_EQ(br[0].signal, 0u);
  EXPECT_NEAR(br[0].prob, 0.5, 1e-15);
  EXPECT_NEAR(br[0].posterior[g1_state::kMinusMinus], p / 2, 1e-15);
  EXPECT_NEAR(br[0].posterior[g1_state::kMinus], 1 - p / 2, 1e-15);
  EXPECT_EQ(br[1].signal, 1u);
  EXPECT_NEAR(br[1].prob, 0.5, 1e-15);
  EXPECT_NEAR(br[1].posterior[g1_state::kMinusMinus], 1.0, 1e-15);
}

TEST(Branch, GeneralHalfGameUnderC) {
  const double h = 0.3, p = 0.7;
  const GeneralSignalGame g = build_tilde_half(Side::kMinus, h);
  const auto br = branch(g, Belief({1 - p, p, 0, 0}), 0, 0);
  ASSERT_EQ(br.size(), 2u);
  EXPECT_NEAR(br[0].prob, 0.5, 1e-15);
  EXPECT_NEAR(br[0].posterior[1], p - h * p / 2, 1e-15);
  EXPECT_NEAR(br[1].prob, 0.5, 1e-15);
  EXPECT_NEAR(br[1].posterior[1], p + h - h * p, 1e-15);
}

TEST(Branch, DeterministicTransition) {
  const PartitionSignalGame g = euler_transform(build_g1(), 1.0);
  const auto br = branch(g, Belief::point(6, g1_state::kMinusMinus), 2, 1);
  ASSERT_EQ(br.size(), 1u);
  EXPECT_EQ(br[0].prob, 1.0);
  EXPECT_EQ(br[0].posterior, Belief::point(6, g1_state::kMinusStar));
}

TEST(Drift, HalfMinusExamples) {
  const PartitionSignalGame q = build_half(Side::kMinus, 0.0);
  const double p1 = 0.3, p2 = 0.5;
  const std::vector<double> m{p1, p2, 0, 0};
  const auto tl = drift(m, q, 0, 0);
  EXPECT_DOUBLE_EQ(tl[0], p2 / 2);
  EXPECT_DOUBLE_EQ(tl[1], -p2 / 2);
  EXPECT_DOUBLE_EQ(tl[2], 0.0);
  EXPECT_DOUBLE_EQ(tl[3], 0.0);
  const auto ql = drift(m, q, 2, 0);
  EXPECT_DOUBLE_EQ(ql[0], -p1);
  EXPECT_DOUBLE_EQ(ql[1], -p2);
  EXPECT_DOUBLE_EQ(ql[2], p2);
  EXPECT_DOUBLE_EQ(ql[3], p1);
}

TEST(Drift, ZeroKernel) {
  const PartitionSignalGame q =
      PartitionSignalGame::create({"a", "b"}, {"s"}, {0, 0}, {{"x"}}, {{"y"}}, DynamicsKind::kKernel);
  const std::vector<double> m{0.25, 0.75};
  for (double d : drift(m, q, 0, 0)) EXPECT_EQ(d, 0.0);
}

// Averaging the posteriors with their probabilities gives back the law of
// the next state, and each posterior sits on the class of its signal.
TEST(BeliefProperty, PosteriorsAverageToNextStateLaw) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GeneralSignalGame gt = build_g1_tilde();
  const PartitionSignalGame g = euler_transform(build_g1(), 0.6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> w(6);
    for (double& x : w) x = u(rng);
    const Belief p = Belief::normalized(w);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const auto law = next_state_law(gt, p, i, j);
        std::vector<double> avg(6, 0.0);
        double total = 0.0;
        for (const auto& b : branch(gt, p, i, j)) {
          total += b.prob;
          for (std::size_t k = 0; k < 6; ++k) avg[k] += b.prob * b.posterior[k];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(avg[k], law[k], 1e-12);
      }
    // Partition game: restrict to the MINUS class to keep profiles admissible.
    std::vector<double> mw{0, 0, 0, u(rng), u(rng), u(rng)};
    const Belief pm = Belief::normalized(mw);
    for (const auto& b : branch(g, pm, 0, 1))
      for (std::size_t k = 0; k < 6; ++k) {
        if (b.posterior[k] > 0.0) {
          EXPECT_EQ(g.partition[k], b.signal);
        }
      }
  }
}

TEST(BeliefKey, EqualUpToQuantum) {
  const Belief a({0.3, 0.7}), b({0.3 + 1e-15, 0.7 - 1e-15}), c({0.31, 0.69});
  EXPECT_EQ(belief_key(a), belief_key(b));
  EXPECT_NE(belief_key(a), belief_key(c));
}
