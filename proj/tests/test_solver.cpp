#include <gtest/gtest.h>

#include <random>

#include "sdg/finite_game.hpp"
#include "sdg/instances.hpp"
#include "sdg/reduced.hpp"
#include "sdg/solver.hpp"

using namespace sdg;

namespace {

Belief minus_side(double p) {
  std::vector<double> w(6, 0.0);
  w[g1_state::kMinus] = 1 - p;
  w[g1_state::kMinusMinus] = p;
  return Belief(w);
}

FiniteGame random_finite_game(std::mt19937_64& rng, std::size_t nodes, double beta) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FiniteGame g;
  for (std::size_t k = 0; k < nodes; ++k) {
    const std::size_t m = 1 + rng() % 3, n = 1 + rng() % 3;
    g.begin_node(m, n);
    for (std::size_t c = 0; c < m * n; ++c) {
      std::vector<Transition> next;
      double total = 0.0;
      for (std::size_t t = 0; t < 3; ++t) {
        next.push_back({static_cast<std::uint32_t>(rng() % nodes), u(rng)});
        total += next.back().weight;
      }
      for (auto& t : next) t.weight *= beta / total;
      g.add_cell(2 * u(rng) - 1, next);
    }
    g.end_node();
  }
  return g;
}

}  // namespace

TEST(ShapleyBackup, AbsorbingState) {
  const auto m = make_stage(build_g1(), 0.3, 1.0);
  const auto v = [](const Belief& p) { return p[g1_state::kMinusStar] > 0.5 ? -1.0 : 0.0; };
  EXPECT_NEAR(shapley_backup(m, Belief::point(6, g1_state::kMinusStar), v).value, -1.0, 1e-15);
}

TEST(ShapleyBackup, GeneralHalfWithZeroContinuation) {
  const auto m = discounted_stage(build_tilde_half(Side::kMinus, 1.0), 0.5, 1.0);
  for (double p : {0.0, 0.4, 1.0})
    EXPECT_NEAR(shapley_backup(m, Belief({1 - p, p, 0, 0}), [](const Belief&) { return 0.0; }).value, -0.5, 1e-15);
}

TEST(ShapleyBackupProperty, Monotone) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto m = make_stage(build_g1(), 0.2, 0.5);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng), b = u(rng), shift = 0.5 * (u(rng) + 1.0);
    const auto v1 = [&](const Belief& p) { return a * p[4] + b * p[1] - 0.2 * p[3]; };
    const auto v2 = [&](const Belief& p) { return v1(p) + shift; };
    const Belief p = minus_side(0.5 * (u(rng) + 1.0));
    EXPECT_LE(shapley_backup(m, p, v1).value, shapley_backup(m, p, v2).value + 1e-12);
  }
}

TEST(Tree, AbsorbingFromTheStart) {
  for (double eps : {1e-2, 1e-8}) {
    const TreeResult r = solve_tree(make_stage(build_g1(), 0.3, 1.0), Belief::point(6, g1_state::kPlusStar),
                                    TreeOptions{eps});
    EXPECT_EQ(r.value, 1.0);
  }
}

TEST(Tree, AgreesWithGridOnTheTwoSidedExample) {
  const auto m = make_stage(build_g1(), 0.5, 1.0);
  const Belief p0 = Belief::point(6, g1_state::kMinusMinus);
  const TreeResult t = solve_tree(m, p0, TreeOptions{1e-6});
  GridOptions opt;
  opt.resolution = 64;
  const GridValueFn f = solve_grid(m, opt);
  EXPECT_LE(std::abs(t.value - f(p0)), 1e-5 + f.error_bound + t.error_bound);
  const TreeResult gt = solve_tree(make_stage(build_g1_tilde(), 0.5, 1.0), p0, TreeOptions{1e-6});
  EXPECT_LE(std::abs(t.value - gt.value), t.error_bound + gt.error_bound);
}

TEST(Tree, CoarseAndFineAgreeWithinBounds) {
  const auto m = make_stage(build_g1(), 0.2, 1.0);
  const Belief p0 = minus_side(0.7);
  const TreeResult coarse = solve_tree(m, p0, TreeOptions{1e-2});
  const TreeResult fine = solve_tree(m, p0, TreeOptions{1e-9});
  EXPECT_LE(std::abs(coarse.value - fine.value), coarse.error_bound + fine.error_bound);
  EXPECT_GT(coarse.error_bound, fine.error_bound);
}

TEST(Tree, NonuniformScheduleMatchesHandUnroll) {
  const PartitionSignalGame q = build_perfect_test();
  const double lambda = 0.4;
  const Belief p0 = Belief::point(2, 0);
  const TreeResult r = solve_tree(q, p0, lambda, StageSchedule::make({1.0}, 0.5), TreeOptions{1e-9});
  const auto tail = make_stage(q, lambda, 0.5);
  double tail_err = 0.0;
  const auto v = [&](const Belief& p) {
    const TreeResult t = solve_tree(tail, p, TreeOptions{1e-9});
    tail_err = std::max(tail_err, t.error_bound);
    return t.value;
  };
  const double first = shapley_backup(make_stage(q, lambda, 1.0), p0, v).value;
  EXPECT_LE(std::abs(r.value - first), r.error_bound + tail_err);
  // The schedule matters: a uniform h = 0.5 tree gives a different value.
  const TreeResult uniform = solve_tree(tail, p0, TreeOptions{1e-9});
  EXPECT_GT(std::abs(uniform.value - r.value), 1e-3);
}

TEST(Tree, BudgetExceeded) {
  const auto m = discounted_stage(build_tilde_half(Side::kMinus, 0.05), 0.1, 0.05);
  TreeOptions opt{1e-6, 1000};
  try {
    solve_tree(m, Belief({0.5, 0.5, 0, 0}), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  opt.fit_budget = true;
  const TreeResult r = solve_tree(m, Belief({0.5, 0.5, 0, 0}), opt);
  EXPECT_LE(r.nodes, 1000u);
  EXPECT_GT(r.error_bound, 1e-6);
}

TEST(Grid, ConstantPayoffGame) {
  PartitionSignalGame q = build_perfect_test();
  for (auto& per_state : q.payoff)
    for (double& x : per_state) x = 0.7;
  GridOptions opt;
  opt.resolution = 5;
  const GridValueFn f = solve_grid(make_stage(q, 0.3, 0.5), opt);
  for (double v : f.values) EXPECT_NEAR(v, 0.7, 1e-9);
}

TEST(Grid, MonotoneFromLowerBound) {
  const auto m = discounted_stage(build_tilde_half(Side::kMinus, 0.5), 0.5, 0.5);
  GridOptions opt;
  opt.resolution = 8;
  opt.method = GridMethod::kGaussSeidel;
  opt.start_from_lower_bound = true;
  std::vector<double> prev;
  std::size_t steps = 0;
  opt.on_iteration = [&](std::size_t, const std::vector<double>& v) {
    if (!prev.empty()) {
      for (std::size_t k = 0; k < v.size(); ++k) EXPECT_GE(v[k], prev[k] - 1e-12);
    }
    prev = v;
    ++steps;
  };
  const GridValueFn gs = solve_grid(m, opt);
  EXPECT_GT(steps, 2u);
  GridOptions pi;
  pi.resolution = 8;
  const GridValueFn f = solve_grid(m, pi);
  for (std::size_t k = 0; k < f.values.size(); ++k) EXPECT_NEAR(f.values[k], gs.values[k], 1e-7);
}

TEST(Grid, RejectsLargeClasses) {
  EXPECT_THROW(solve_grid(make_stage(build_g1_tilde(), 0.5, 1.0)), Error);
}

TEST(FiniteGameProperty, PolicyIterationMatchesGaussSeidel) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const FiniteGame g = random_finite_game(rng, 6 + t % 5, 0.9);
    FiniteSolveOptions opt;
    opt.tol = 1e-11;
    const FiniteSolveResult a = solve_policy_iteration(g, opt), b = solve_gauss_seidel(g, opt);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-9);
    EXPECT_LE(bellman_residual(g, a.values), 1e-10);
  }
}

TEST(Simulate, ConstantPayoffGame) {
  PartitionSignalGame q = build_perfect_test();
  for (auto& per_state : q.payoff)
    for (double& x : per_state) x = 0.6;
  const auto m = make_stage(q, 0.3, 0.5);
  const Strategy uniform = [](const Belief& p) { return std::vector<double>(p[0] > 0 ? 2 : 1, p[0] > 0 ? 0.5 : 1.0); };
  const std::size_t H = 17;
  const SimulationResult r = simulate(m, uniform, uniform, Belief::point(2, 0), H, 500, 3);
  EXPECT_NEAR(r.mean, 0.6 * (1 - std::pow(1 - 0.15, H)), 1e-14);
  EXPECT_NEAR(r.half_width, 0.0, 1e-14);
}

TEST(Simulate, SeedDeterminesResult) {
  const auto m = make_stage(build_g1(), 0.2, 1.0);
  const CoupledResult coupled = solve_coupled_g1(0.2, 1.0);
  const auto v = [&](const Belief& p) { return g1_value(coupled, p); };
  const Strategy x = [&](const Belief& p) { return extract_strategy(m, v, p).x; };
  const Strategy y = [&](const Belief& p) { return extract_strategy(m, v, p).y; };
  const Belief p0 = Belief::point(6, g1_state::kMinusMinus);
  const SimulationResult a = simulate(m, x, y, p0, 20, 300, 42), b = simulate(m, x, y, p0, 20, 300, 42);
  const SimulationResult c = simulate(m, x, y, p0, 20, 300, 43);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_NE(a.mean, c.mean);
}

TEST(ExtractStrategy, TwoSidedExample) {
  const auto m = make_stage(build_g1(), 0.2, 1.0);
  const auto v = [&](const Belief& p) { return solve_tree(m, p, TreeOptions{1e-8}).value; };
  // Beliefs deep in the continuation region; where player 1 quits, the
  // column strategy is not unique.
  const StrategyPair minus = extract_strategy(m, v, minus_side(0.9));
  ASSERT_EQ(minus.y.size(), 2u);
  EXPECT_NEAR(minus.y[0], 0.5, 1e-9);
  EXPECT_NEAR(minus.y[1], 0.5, 1e-9);
  std::vector<double> w(6, 0.0);
  w[g1_state::kPlus] = 0.1;
  w[g1_state::kPlusPlus] = 0.9;
  const StrategyPair plus = extract_strategy(m, v, Belief(w));
  ASSERT_EQ(plus.x.size(), 3u);
  for (double a : plus.x) EXPECT_NEAR(a, 1.0 / 3.0, 1e-9);
  const StrategyPair absorbed = extract_strategy(m, v, Belief::point(6, g1_state::kMinusStar));
  EXPECT_LE(absorbed.gap, 1e-10);
}

TEST(Perfect, TrivialGames) {
  PartitionSignalGame one =
      PartitionSignalGame::create({"a"}, {"s"}, {0}, {{"x"}}, {{"y"}}, DynamicsKind::kKernel);
  one.g(0, 0, 0) = -0.4;
  EXPECT_NEAR(solve_perfect(one, 0.7).values[0], -0.4, 1e-14);
  PartitionSignalGame zero = build_perfect_test();
  for (auto& per_state : zero.payoff)
    for (double& x : per_state) x = 0.0;
  for (double v : solve_perfect(zero, 0.5).values) EXPECT_EQ(v, 0.0);
}

TEST(Perfect, AgreesWithTree) {
  const PartitionSignalGame q = build_perfect_test();
  for (double lambda : {0.5, 1.0}) {
    const std::vector<double> v = solve_perfect(q, lambda).values;
    const double l1 = lambda / (1 + lambda);
    const TreeResult t = solve_tree(make_stage(q, l1, 1.0), Belief::point(2, 0), TreeOptions{1e-9});
    EXPECT_NEAR(v[0], t.value, 1e-6);
    EXPECT_GE(v[0], 0.0);
    EXPECT_LE(v[0], 1.0);
    const auto m = euler_stage(q, lambda, 0.25);
    const TreeResult th = solve_tree(m, Belief::point(2, 0), TreeOptions{1e-9});
    EXPECT_NEAR(solve_perfect_stage(m)[0], th.value, 1e-6);
  }
}

TEST(Perfect, RejectsSignalledGames) { EXPECT_THROW(solve_perfect(build_g1(), 0.5), Error); }

TEST(TruncationHorizon, SmallestSufficientHorizon) {
  const std::size_t H = truncation_horizon(0.8, 1e-4);
  EXPECT_LE(std::pow(0.8, static_cast<double>(H)), 1e-4);
  EXPECT_GT(std::pow(0.8, static_cast<double>(H - 1)), 1e-4);
}
