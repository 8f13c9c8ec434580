#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sdg/closed_form.hpp"
#include "sdg/game_io.hpp"
#include "sdg/instances.hpp"
#include "sdg/matrix_game.hpp"
#include "sdg/reduced.hpp"
#include "sdg/solver.hpp"

// The acceptance battery. Every tolerance is a named constant below.
namespace sdg::verify {

// Criterion 1
inline constexpr double kLimitLambda = 1e-3, kLimitH = 1e-3, kLimitTol = 0.02, kLimitSolveTol = 1e-8;
inline constexpr std::size_t kLimitResolution = 20'000;
inline constexpr double kCoupledVsClosedTol = 1e-6;
// Criterion 2
inline constexpr double kReducedConvergenceTol = 5e-3;
// Criterion 3
inline constexpr double kExactTol = 1e-15;
// Criterion 4
inline constexpr double kPdeAnalyticTol = 1e-8, kPdeFiniteDiffTol = 1e-4;
inline constexpr int kPdeGrid = 50;
// Criterion 5: frozen from the computation (overall range 0.179, per-decade
// ranges 0.081, 0.091, 0.111 from small to large lambda).
inline constexpr double kOscillationDelta = 0.15;
inline constexpr int kOscillationPoints = 60;
// Criterion 7
inline constexpr double kPerfectLambda = 0.3, kPerfectRatio = 0.7, kPerfectFitH = 0.05;
// Criterion 8
inline constexpr double kStochasticRowTol = 1e-10, kTransformLambda = 0.1;
// Criterion 9
inline constexpr std::size_t kSimulationPaths = 100'000;
inline constexpr std::uint64_t kSimulationSeed = 20240601;
inline constexpr double kSimulationTruncation = 1e-4;
// Criterion 10
inline constexpr std::size_t kOracleBeliefs = 20, kOracleMatrices = 500;
inline constexpr std::uint64_t kOracleSeed = 7;
inline constexpr double kMatrixOracleTol = 1e-6;

// Game constructors used by the battery, replaceable to test that the
// battery notices a broken game.
struct Builders {
  std::function<PartitionSignalGame()> g1 = build_g1;
  std::function<GeneralSignalGame()> g1_tilde = build_g1_tilde;
  std::function<PartitionSignalGame(Side, double)> half = build_half;
  std::function<GeneralSignalGame(Side, double)> tilde_half = build_tilde_half;
  std::function<PartitionSignalGame()> perfect = build_perfect_test;
};

// G1 with one transition of the -- state under (T, L) moved: 0.6 instead of
// 0.5 to -.
inline Builders canary_builders() {
  Builders b;
  b.g1 = [] {
    PartitionSignalGame q = build_g1();
    auto row = q.row(g1_state::kMinusMinus, 0, 0);
    row[g1_state::kMinus] = 0.6;
    row[g1_state::kMinusMinus] = -0.6;
    return q;
  };
  return b;
}

struct Report {
  int id = 0;
  std::string name;
  bool pass = false;
  Json measured = Json::object();
  Json tolerance = Json::object();
  std::string note;
  double seconds = 0.0;
};

inline Report make_report(int id, std::string name) {
  Report r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

inline Json to_json(const Report& r) {
  Json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["status"] = r.pass ? "pass" : "fail";
  j["measured"] = r.measured;
  j["tolerance"] = r.tolerance;
  if (!r.note.empty()) j["note"] = r.note;
  j["seconds"] = r.seconds;
  return j;
}

inline std::vector<int> suite(std::string_view name) {
  if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (name == "limits") return {1, 2, 3};
  if (name == "pde") return {4};
  if (name == "oscillation") return {5};
  if (name == "equivalence") return {6, 8, 9, 10};
  if (name == "perfect") return {7};
  fail(ErrorCode::kInvalidArgument, "unknown suite '" + std::string(name) + "'");
}

namespace detail {

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Value of a 2 x n game (n <= 3) by enumerating pure and 2 x 2 supports.
inline double support_enumeration_value(const MatrixGame& M) {
  const std::size_t m = M.rows(), n = M.cols();
  const double eps = 1e-12;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool ok = true;
      for (std::size_t r = 0; r < m; ++r) ok = ok && M(r, j) <= M(i, j) + eps;
      for (std::size_t c = 0; c < n; ++c) ok = ok && M(i, c) >= M(i, j) - eps;
      if (ok) return M(i, j);
    }
  if (m != 2) fail(ErrorCode::kInvalidArgument, "support enumeration oracle handles two rows");
  for (std::size_t j1 = 0; j1 < n; ++j1)
    for (std::size_t j2 = j1 + 1; j2 < n; ++j2) {
      const double a = M(0, j1), b = M(0, j2), c = M(1, j1), d = M(1, j2);
      const double den = a - b - c + d;
      if (std::abs(den) < 1e-14) continue;
      const double x = (d - c) / den;        // weight on row 0
      const double y = (d - b) / den;        // weight on column j1
      if (x < -eps || x > 1 + eps || y < -eps || y > 1 + eps) continue;
      const double v = x * a + (1 - x) * c;
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) ok = ok && x * M(0, j) + (1 - x) * M(1, j) >= v - 1e-10;
      if (ok) return v;
    }
  fail(ErrorCode::kNoConvergence, "support enumeration found no equilibrium");
}

// Mixed strategies from a belief-indexed function, memoized by belief key.
class CachedStrategy {
 public:
  explicit CachedStrategy(std::function<std::vector<double>(const Belief&)> f) : f_(std::move(f)) {}
  std::vector<double> operator()(const Belief& p) {
    auto key = belief_key(p);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(std::move(key), f_(p)).first->second;
  }

 private:
  std::function<std::vector<double>(const Belief&)> f_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<double>, BeliefKeyHash> cache_;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// 1. Limit constants from the coupled half-game recursions.
inline Report criterion_limits(const Builders&) {
  Report r = make_report(1, "limit constants 7/11 and -5/11");
  const CoupledResult c = solve_coupled_g1(kLimitLambda, kLimitH, {kLimitResolution, kLimitSolveTol});
  const double dp = std::abs(c.v_plus - 7.0 / 11.0), dm = std::abs(c.v_minus + 5.0 / 11.0);
  const double closed = std::max(std::abs(c.v_plus - c.closed.v_plus), std::abs(c.v_minus - c.closed.v_minus));
  r.measured = {{"v_plusplus", c.v_plus},  {"v_minusminus", c.v_minus},     {"dev_plus", dp},
                {"dev_minus", dm},         {"coupled_vs_closed", closed},   {"iterations", c.iterations},
                {"error_bound", c.error_bound}};
  // Refinement study at doubled lambda = h, reported only.
  const CoupledResult c2 = solve_coupled_g1(2 * kLimitLambda, 2 * kLimitH, {kLimitResolution, kLimitSolveTol});
  r.measured["dev_plus_at_2x"] = std::abs(c2.v_plus - 7.0 / 11.0);
  r.measured["dev_minus_at_2x"] = std::abs(c2.v_minus + 5.0 / 11.0);
  r.tolerance = {{"deviation", kLimitTol}, {"coupled_vs_closed", kCoupledVsClosedTol}};
  r.pass = dp <= kLimitTol && dm <= kLimitTol && closed <= kCoupledVsClosedTol;
  return r;
}

// 2. Reduced recursions converge to the closed-form half-game values.
inline Report criterion_reduced_convergence(const Builders&) {
  Report r = make_report(2, "reduced recursion -> closed form w");
  const double hs[] = {1e-2, 1e-3, 1e-4};
  bool ok = true;
  for (Side side : {Side::kMinus, Side::kPlus})
    for (double lambda : {0.2, 0.05}) {
      Json errs = Json::array();
      double prev = std::numeric_limits<double>::infinity();
      for (double h : hs) {
        const LineValueFn f = solve_reduced(side, lambda, h, 0.0);
        double e = 0.0;
        for (int k = 0; k <= 20; ++k) {
          const double p = k / 20.0;
          e = std::max(e, std::abs(f(p) - w(side, lambda, p)));
        }
        errs.push_back(e);
        ok = ok && e < prev;
        prev = e;
      }
      ok = ok && prev <= kReducedConvergenceTol;
      r.measured[std::string(to_string(side)) + "_lambda_" + std::to_string(lambda).substr(0, 4)] = errs;
    }
  r.measured["h"] = {hs[0], hs[1], hs[2]};
  r.tolerance = {{"max_error_at_smallest_h", kReducedConvergenceTol}, {"decreasing_in_h", true}};
  r.pass = ok;
  return r;
}

// 3. Combination identities.
inline Report criterion_identities(const Builders&) {
  Report r = make_report(3, "combination identities");
  const CombinedValues c = combine_half_values(-2.0 / 3.0, 3.0 / 4.0);
  const double e1 = std::abs(c.v_plus - 7.0 / 11.0), e2 = std::abs(c.v_minus + 5.0 / 11.0);
  const double e3 = std::abs(affine_extend(Side::kMinus, -2.0 / 3.0, 7.0 / 11.0) + 5.0 / 11.0);
  const double e4 = std::abs(affine_extend(Side::kPlus, 3.0 / 4.0, -5.0 / 11.0) - 7.0 / 11.0);
  const double e5 = std::abs(-18.0 / 11.0 * 2.0 / 3.0 + 7.0 / 11.0 + 5.0 / 11.0);
  const double e6 = std::abs(16.0 / 11.0 * 3.0 / 4.0 - 5.0 / 11.0 - 7.0 / 11.0);
  r.measured = {{"combine_plus", e1}, {"combine_minus", e2}, {"extend_minus", e3},
                {"extend_plus", e4},  {"eval_minus", e5},    {"eval_plus", e6}};
  r.tolerance = {{"abs", kExactTol}};
  r.pass = std::max({e1, e2, e3, e4, e5, e6}) <= kExactTol;
  return r;
}

// 4. Classical residual of the limit equation for the explicit solutions.
inline Report criterion_pde(const Builders&) {
  Report r = make_report(4, "limit equation residual");
  double analytic = 0.0, fd = 0.0;
  std::size_t points = 0;
  for (Side side : {Side::kMinus, Side::kPlus})
    for (double lambda : {0.05, 0.2}) {
      const ValueWithGradient exact = wbar(side, lambda);
      const ValueWithGradient approx = with_finite_differences(exact);
      for (int i = 1; i <= kPdeGrid; ++i)
        for (int j = 1; j <= kPdeGrid; ++j) {
          const double p1 = i / (kPdeGrid + 1.0), p2 = j / (kPdeGrid + 1.0);
          if (p1 + p2 >= 1.0) continue;
          analytic = std::max(analytic, std::abs(pde_residual(side, lambda, p1, p2, exact)));
          fd = std::max(fd, std::abs(pde_residual(side, lambda, p1, p2, approx)));
          ++points;
        }
    }
  r.measured = {{"max_residual_analytic", analytic}, {"max_residual_finite_diff", fd}, {"points", points}};
  r.tolerance = {{"analytic", kPdeAnalyticTol}, {"finite_diff", kPdeFiniteDiffTol}};
  r.pass = analytic <= kPdeAnalyticTol && fd <= kPdeFiniteDiffTol;
  return r;
}

// 5. v_{1,lambda}(--) keeps oscillating as lambda -> 0.
inline Report criterion_oscillation(const Builders& b) {
  Report r = make_report(5, "oscillation of v_{1,lambda}");
  std::vector<double> lambdas, values;
  for (int k = 0; k < kOscillationPoints; ++k) {
    const double lambda = std::pow(10.0, -5.0 + 3.0 * k / (kOscillationPoints - 1));
    lambdas.push_back(lambda);
    values.push_back(solve_coupled_g1(lambda, 1.0, {0, 1e-10}).v_minus);
  }
  auto range_in = [&](double lo, double hi) {
    double a = std::numeric_limits<double>::infinity(), z = -a;
    for (std::size_t k = 0; k < lambdas.size(); ++k)
      if (lambdas[k] >= lo * (1 - 1e-12) && lambdas[k] <= hi * (1 + 1e-12)) {
        a = std::min(a, values[k]);
        z = std::max(z, values[k]);
      }
    return z - a;
  };
  const double overall = range_in(1e-5, 1e-2);
  const double d5 = range_in(1e-5, 1e-4), d4 = range_in(1e-4, 1e-3), d3 = range_in(1e-3, 1e-2);
  // Independent check of the reduced chain against the tree solver on G1.
  const double lambda_check = 1e-2;
  const TreeResult tree =
      solve_tree(make_stage(b.g1(), lambda_check, 1.0), Belief::point(6, g1_state::kMinusMinus), TreeOptions{1e-9});
  const double reduced = solve_coupled_g1(lambda_check, 1.0, {0, 1e-12}).v_minus;
  const double tree_gap = std::abs(tree.value - reduced);
  r.measured = {{"range", overall},       {"decade_1e-5", d5},           {"decade_1e-4", d4},
                {"decade_1e-3", d3},      {"tree_vs_reduced", tree_gap}, {"tree_error_bound", tree.error_bound},
                {"values", values}};
  r.tolerance = {{"delta_osc", kOscillationDelta},
                 {"last_two_decades_min", kOscillationDelta / 2},
                 {"tree_vs_reduced", tree.error_bound + 1e-9}};
  r.pass = overall >= kOscillationDelta && d5 >= kOscillationDelta / 2 && d4 >= kOscillationDelta / 2 &&
           tree_gap <= tree.error_bound + 1e-9;
  return r;
}

// 6. Partition-signal and general-signal constructions give the same value.
inline Report criterion_equivalence(const Builders& b) {
  Report r = make_report(6, "G1 and its general-signal form agree");
  const PartitionSignalGame g1 = b.g1();
  const GeneralSignalGame gt = b.g1_tilde();
  const Belief p1 = Belief::point(6, g1_state::kMinusMinus);
  const Belief p2 = Belief::point(gt.num_states(), gt.state_index("--"));
  bool ok = true;
  Json rows = Json::array();
  for (double lambda : {0.5, 0.2, 0.05}) {
    const TreeResult a = solve_tree(make_stage(g1, lambda, 1.0), p1, TreeOptions{1e-8});
    const TreeResult c = solve_tree(make_stage(gt, lambda, 1.0), p2, TreeOptions{1e-8});
    const double gap = std::abs(a.value - c.value);
    ok = ok && gap <= a.error_bound + c.error_bound;
    rows.push_back({{"lambda", lambda}, {"g1", a.value}, {"g1_general", c.value}, {"gap", gap},
                    {"bound", a.error_bound + c.error_bound}});
  }
  r.measured["rows"] = rows;
  r.tolerance = {{"gap", "sum of tree error bounds"}};
  r.pass = ok;
  return r;
}

// 7. Perfect-observation trends in h and lambda.
inline Report criterion_perfect(const Builders& b) {
  Report r = make_report(7, "perfect-observation trends");
  const PartitionSignalGame q = b.perfect();
  const std::vector<double> ref = solve_perfect(q, kPerfectLambda).values;
  Json errs = Json::array(), ratios = Json::array();
  bool ok = true;
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const double e = detail::max_abs_diff(solve_perfect_stage(euler_stage(q, kPerfectLambda, h)), ref);
    if (!errs.empty()) {
      const double ratio = e / prev;
      ratios.push_back(ratio);
      ok = ok && ratio <= kPerfectRatio;
    }
    errs.push_back(e);
    prev = e;
  }
  auto gap = [&](double lambda) {
    return detail::max_abs_diff(solve_perfect_stage(euler_stage(q, lambda, kPerfectFitH)),
                                solve_perfect_stage(euler_stage(q, lambda, 1.0)));
  };
  const double C = gap(0.2) / 0.2;
  const double g1 = gap(0.1), g2 = gap(0.05);
  ok = ok && g1 <= C * 0.1 && g2 <= C * 0.05;
  r.measured = {{"errors_h", errs}, {"ratios", ratios}, {"C", C}, {"gap_0.1", g1}, {"gap_0.05", g2}};
  r.tolerance = {{"ratio", kPerfectRatio}, {"bound_0.1", C * 0.1}, {"bound_0.05", C * 0.05}, {"h", kPerfectFitH}};
  r.pass = ok;
  return r;
}

// 8. Exponential and Euler stage games agree to first order in h.
inline Report criterion_transforms(const Builders& b) {
  Report r = make_report(8, "exp vs Euler stage transforms");
  const PartitionSignalGame q = b.half(Side::kMinus, 0.0);
  const std::size_t n = q.num_states();
  double row_err = 0.0;
  std::vector<double> diffs;
  for (double h : {1e-2, 1e-3}) {
    std::vector<double> gen(n * n);
    for (std::size_t i = 0; i < q.rows(0); ++i)
      for (std::size_t j = 0; j < q.cols(0); ++j) {
        for (std::size_t w = 0; w < n; ++w)
          for (std::size_t v = 0; v < n; ++v) gen[w * n + v] = h * q.row(w, i, j)[v];
        const std::vector<double> e = matrix_exp(gen, n);
        for (std::size_t w = 0; w < n; ++w) {
          double s = 0.0;
          for (std::size_t v = 0; v < n; ++v) s += e[w * n + v];
          row_err = std::max(row_err, std::abs(s - 1.0));
        }
      }
    const std::size_t R = default_reduced_resolution(h);
    const BlindLine eu = solve_blind_line(euler_stage(q, kTransformLambda, h), half_state::kOne, half_state::kTwo, R);
    const BlindLine ex =
        solve_blind_line(exp_transform(q, h, kTransformLambda), half_state::kOne, half_state::kTwo, R);
    double d = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double p = k / 20.0;
      d = std::max(d, std::abs(eu.fn(p) - ex.fn(p)));
    }
    diffs.push_back(d);
  }
  const double C = diffs[0] / 1e-2;
  r.measured = {{"max_row_sum_error", row_err}, {"diff_h1e-2", diffs[0]}, {"diff_h1e-3", diffs[1]}, {"C", C}};
  r.tolerance = {{"row_sum", kStochasticRowTol}, {"bound_h1e-3", C * 1e-3}};
  r.pass = row_err <= kStochasticRowTol && diffs[1] <= C * 1e-3;
  return r;
}

// 9. Monte-Carlo payoff of the extracted strategies matches the value.
inline Report criterion_simulation(const Builders& b) {
  Report r = make_report(9, "Monte-Carlo cross-check");
  const double lambda = 0.2;
  const StageModel<PartitionSignalGame> m = make_stage(b.g1(), lambda, 1.0);
  const Belief p0 = Belief::point(6, g1_state::kMinusMinus);
  const TreeResult root = solve_tree(m, p0, TreeOptions{1e-9});
  std::unordered_map<std::vector<std::int64_t>, double, BeliefKeyHash> memo;
  auto v = [&](const Belief& p) {
    auto key = belief_key(p);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double val = solve_tree(m, p, TreeOptions{1e-9}).value;
    memo.emplace(std::move(key), val);
    return val;
  };
  detail::CachedStrategy sigma([&](const Belief& p) { return extract_strategy(m, v, p).x; });
  detail::CachedStrategy tau([&](const Belief& p) { return extract_strategy(m, v, p).y; });
  const std::size_t horizon = truncation_horizon(m.discount.continuation, kSimulationTruncation);
  const SimulationResult s = simulate(
      m, [&](const Belief& p) { return sigma(p); }, [&](const Belief& p) { return tau(p); }, p0, horizon,
      kSimulationPaths, kSimulationSeed);
  const double G = payoff_bound(m);
  const double truncation = std::pow(m.discount.continuation, static_cast<double>(horizon)) * G;
  const double gap = std::abs(s.mean - root.value);
  const double allowed = s.half_width + root.error_bound + truncation;
  r.measured = {{"value", root.value}, {"mean", s.mean},        {"half_width", s.half_width}, {"gap", gap},
                {"paths", s.paths},    {"seed", s.seed},        {"horizon", horizon}};
  r.tolerance = {{"allowed", allowed}, {"solver_error", root.error_bound}, {"truncation", truncation}};
  r.pass = gap <= allowed;
  return r;
}

// 10. Solver cross-checks and the matrix-game oracle.
inline Report criterion_oracles(const Builders& b) {
  Report r = make_report(10, "solver and matrix-game oracles");
  std::mt19937_64 rng(kOracleSeed);
  auto random_belief = [&](std::size_t n) {
    std::vector<double> x(n);
    for (double& e : x) e = -std::log(1.0 - sdg::detail::uniform01(rng));
    return Belief::normalized(std::move(x));
  };
  // (a) The stated setting: lambda = 0.1, h = 0.05.
  const double lambda = 0.1, h = 0.05;
  const GeneralSignalGame g = b.tilde_half(Side::kMinus, h);
  const StageModel<GeneralSignalGame> m = discounted_stage(g, lambda, h);
  GridOptions grid_opt;
  grid_opt.resolution = 40;
  const GridValueFn grid = solve_grid(m, grid_opt);
  const LineValueFn red = solve_reduced(Side::kMinus, lambda, h, 0.0);
  double worst_tree = 0.0, worst_grid = 0.0, max_tree_bound = 0.0;
  bool ok = true;
  for (std::size_t t = 0; t < kOracleBeliefs; ++t) {
    const Belief p = random_belief(g.num_states());
    const TreeResult tree = solve_tree(m, p, TreeOptions{1e-6, 100'000, true});
    const double vg = grid(p), vr = half_value(Side::kMinus, 0.0, red, p);
    const double tg = std::abs(tree.value - vg), tr = std::abs(tree.value - vr), gr = std::abs(vg - vr);
    ok = ok && tg <= tree.error_bound + grid.error_bound && tr <= tree.error_bound + red.error_bound &&
         gr <= grid.error_bound + red.error_bound;
    worst_tree = std::max({worst_tree, tg, tr});
    worst_grid = std::max(worst_grid, gr);
    max_tree_bound = std::max(max_tree_bound, tree.error_bound);
  }
  r.measured["tree_gap_max"] = worst_tree;
  r.measured["tree_error_bound_max"] = max_tree_bound;
  r.measured["grid_vs_reduced_max"] = worst_grid;
  r.measured["grid_error_bound"] = grid.error_bound;
  r.measured["reduced_error_bound"] = red.error_bound;
  // (b) A setting where the tree reaches a tight bound: lambda = 1, h = 0.5.
  {
    const GeneralSignalGame g2 = b.tilde_half(Side::kMinus, 0.5);
    const StageModel<GeneralSignalGame> m2 = discounted_stage(g2, 1.0, 0.5);
    const LineValueFn red2 = solve_reduced(Side::kMinus, 1.0, 0.5, 0.0);
    double worst = 0.0, bound = 0.0;
    for (std::size_t t = 0; t < kOracleBeliefs; ++t) {
      const Belief p = random_belief(g2.num_states());
      const TreeResult tree = solve_tree(m2, p, TreeOptions{1e-4});
      const double gap = std::abs(tree.value - half_value(Side::kMinus, 0.0, red2, p));
      ok = ok && gap <= tree.error_bound + red2.error_bound;
      worst = std::max(worst, gap);
      bound = std::max(bound, tree.error_bound + red2.error_bound);
    }
    r.measured["tight_tree_vs_reduced_max"] = worst;
    r.measured["tight_bound"] = bound;
  }
  // (c) Matrix games against support enumeration.
  std::uniform_int_distribution<int> cols(2, 3);
  double worst_matrix = 0.0;
  for (std::size_t t = 0; t < kOracleMatrices; ++t) {
    MatrixGame M(2, static_cast<std::size_t>(cols(rng)));
    for (std::size_t i = 0; i < M.rows(); ++i)
      for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = 2.0 * sdg::detail::uniform01(rng) - 1.0;
    worst_matrix = std::max(worst_matrix, std::abs(matrix_value(M) - detail::support_enumeration_value(M)));
  }
  r.measured["matrix_max_gap"] = worst_matrix;
  r.tolerance = {{"solvers", "sum of error bounds"}, {"matrix", kMatrixOracleTol}};
  r.pass = ok && worst_matrix <= kMatrixOracleTol;
  if (max_tree_bound > 1.0)
    r.note = "at lambda*h = 0.005 the tree is cut by the node cap and its bound exceeds G; the tight check is (b)";
  return r;
}

inline Report run(int id, const Builders& b = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  try {
    switch (id) {
      case 1: r = criterion_limits(b); break;
      case 2: r = criterion_reduced_convergence(b); break;
      case 3: r = criterion_identities(b); break;
      case 4: r = criterion_pde(b); break;
      case 5: r = criterion_oscillation(b); break;
      case 6: r = criterion_equivalence(b); break;
      case 7: r = criterion_perfect(b); break;
      case 8: r = criterion_transforms(b); break;
      case 9: r = criterion_simulation(b); break;
      case 10: r = criterion_oracles(b); break;
      default: fail(ErrorCode::kInvalidArgument, "no criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument && (id < 1 || id > 10)) throw;
    r.id = id;
    r.pass = false;
    r.note = e.what();
  }
  r.seconds = detail::seconds_since(t0);
  return r;
}

}  // namespace sdg::verify
