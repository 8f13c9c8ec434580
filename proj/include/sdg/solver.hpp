#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "sdg/belief.hpp"
#include "sdg/error.hpp"
#include "sdg/finite_game.hpp"
#include "sdg/game_model.hpp"
#include "sdg/grid.hpp"
#include "sdg/matrix_game.hpp"
#include "sdg/stage_duration.hpp"

namespace sdg {

// ---------------------------------------------------------------------------
// Stage models from (game, lambda, h)

// Kernel games get the Euler transform. Partition games already in transition
// form are stage games of duration 1. General games get the signal-augmented
// transform unless h = 1.
inline StageModel<PartitionSignalGame> make_stage(const PartitionSignalGame& g, double lambda, double h) {
  if (g.kind == DynamicsKind::kKernel) return euler_stage(g, lambda, h);
  if (h != 1.0) fail(ErrorCode::kInvalidArgument, "a game in transition form has stage duration 1");
  return discounted_stage(g, lambda, 1.0);
}

inline StageModel<GeneralSignalGame> make_stage(const GeneralSignalGame& g, double lambda, double h) {
  check_discount(lambda, h);
  if (h == 1.0) return discounted_stage(g, lambda, 1.0);
  return discounted_stage(signal_augmented_transform(g, h), lambda, h);
}

// G such that every normalized value lies in [-G, G].
template <class Game>
double payoff_bound(const StageModel<Game>& m) {
  double g = 0.0;
  for (const auto& per_state : m.game.payoff)
    for (double x : per_state) g = std::max(g, std::abs(x));
  return m.discount.payoff_weight * g / (1.0 - m.discount.continuation);
}

// ---------------------------------------------------------------------------
// One-stage structure at a belief

struct BeliefCell {
  double payoff = 0.0;  // expected stage payoff, before the payoff weight
  std::vector<BeliefBranch> next;
};

struct BeliefMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<BeliefCell> cells;  // row-major
};

inline std::size_t admissible_rows(const PartitionSignalGame& g, const Belief& p) {
  return g.actions1[support_class(g, p)].size();
}
inline std::size_t admissible_cols(const PartitionSignalGame& g, const Belief& p) {
  return g.actions2[support_class(g, p)].size();
}
inline std::size_t admissible_rows(const GeneralSignalGame& g, const Belief&) { return g.rows(); }
inline std::size_t admissible_cols(const GeneralSignalGame& g, const Belief&) { return g.cols(); }

template <class Game>
BeliefMatrix belief_matrix(const Game& g, const Belief& p) {
  BeliefMatrix bm;
  bm.rows = admissible_rows(g, p);
  bm.cols = admissible_cols(g, p);
  bm.cells.resize(bm.rows * bm.cols);
  for (std::size_t i = 0; i < bm.rows; ++i)
    for (std::size_t j = 0; j < bm.cols; ++j) {
      BeliefCell& c = bm.cells[i * bm.cols + j];
      c.payoff = expected_payoff(g, p, i, j);
      c.next = branch(g, p, i, j);
    }
  return bm;
}

// Stage payoffs only, weighted.
template <class Game>
MatrixGame payoff_matrix(const StageModel<Game>& m, const Belief& p) {
  MatrixGame out(admissible_rows(m.game, p), admissible_cols(m.game, p));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = m.discount.payoff_weight * expected_payoff(m.game, p, i, j);
  return out;
}

struct BackupResult {
  double value = 0.0;
  MatrixSolution solution;
  MatrixGame matrix{1, 1};
};

// Val[ w g(i,j,p) + beta sum_branches prob v(posterior) ] for any callable v
// on beliefs.
template <class Game, class ValueFn>
BackupResult shapley_backup(const StageModel<Game>& m, const Belief& p, const ValueFn& v, double tol = 1e-12) {
  const BeliefMatrix bm = belief_matrix(m.game, p);
  MatrixGame M(bm.rows, bm.cols);
  for (std::size_t i = 0; i < bm.rows; ++i)
    for (std::size_t j = 0; j < bm.cols; ++j) {
      const BeliefCell& c = bm.cells[i * bm.cols + j];
      double cont = 0.0;
      for (const BeliefBranch& b : c.next) cont += b.prob * v(b.posterior);
      M(i, j) = m.discount.payoff_weight * c.payoff + m.discount.continuation * cont;
    }
  BackupResult r;
  r.solution = solve_matrix_game(M, tol);
  r.value = r.solution.value;
  r.matrix = std::move(M);
  return r;
}

template <class Game, class ValueFn>
BackupResult shapley_backup(const Game& g, const Belief& p, const ValueFn& v, double lambda, double h) {
  return shapley_backup(make_stage(g, lambda, h), p, v);
}

struct StrategyPair {
  std::vector<double> x, y;
  double gap = 0.0;
};

template <class Game, class ValueFn>
StrategyPair extract_strategy(const StageModel<Game>& m, const ValueFn& v, const Belief& p) {
  BackupResult r = shapley_backup(m, p, v);
  return {std::move(r.solution.x), std::move(r.solution.y), r.solution.gap};
}

namespace detail {

// Splits a belief of a partition game into its class-conditional parts.
inline std::vector<std::pair<double, Belief>> class_parts(const PartitionSignalGame& g, const Belief& p) {
  if (p.size() != g.num_states()) fail(ErrorCode::kDimensionMismatch, "belief size does not match the game");
  std::vector<std::pair<double, Belief>> out;
  for (std::size_t s = 0; s < g.num_signals(); ++s) {
    std::vector<double> part(p.size(), 0.0);
    double mass = 0.0;
    for (std::size_t w = 0; w < p.size(); ++w)
      if (g.partition[w] == s) {
        part[w] = p[w];
        mass += p[w];
      }
    if (mass > 0.0) out.emplace_back(mass, Belief::normalized(std::move(part)));
  }
  return out;
}

inline std::vector<std::pair<double, Belief>> class_parts(const GeneralSignalGame&, const Belief& p) {
  return {{1.0, p}};
}

template <class Game>
std::optional<double> absorbing_payoff(const Game& g, const Belief& p) {
  const BeliefMatrix bm = belief_matrix(g, p);
  const double c = bm.cells.front().payoff;
  for (const BeliefCell& cell : bm.cells) {
    if (cell.payoff != c || cell.next.size() != 1) return std::nullopt;
    const BeliefBranch& b = cell.next.front();
    if (std::abs(b.prob - 1.0) > 1e-15 || belief_key(b.posterior) != belief_key(p)) return std::nullopt;
  }
  return c;
}

inline std::vector<std::vector<std::size_t>> state_classes(const PartitionSignalGame& g) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < g.num_signals(); ++s) {
    auto c = g.class_states(s);
    if (!c.empty()) out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> state_classes(const GeneralSignalGame& g) {
  std::vector<std::size_t> all(g.num_states());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return {all};
}

inline std::size_t max_nodes_from_env() {
  if (const char* env = std::getenv("SDG_MAX_NODES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    fail(ErrorCode::kInvalidArgument, std::string("SDG_MAX_NODES is not a positive integer: ") + env);
  }
  return 1'000'000;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tree solver

struct TreeOptions {
  double eps = 1e-6;
  // 0 reads SDG_MAX_NODES, default one million.
  std::size_t max_nodes = 0;
  // When the node cap is hit, cut the tree at the last complete layer and
  // report the truncation actually achieved instead of failing.
  bool fit_budget = false;
};

struct TreeResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t nodes = 0;
  std::size_t horizon = 0;
  // Product of continuation weights over the horizon.
  double truncation = 0.0;
};

namespace detail {

template <class Game>
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<StageModel<Game>>& prefix, const StageModel<Game>& tail)
      : prefix_(prefix), tail_(tail) {}

  const StageModel<Game>& model(std::size_t depth) const { return depth < prefix_.size() ? prefix_[depth] : tail_; }

  // Builds nodes up to depth H. Returns the depth whose expansion overflowed
  // the cap, or nullopt on success.
  std::optional<std::size_t> build(const Belief& root, std::size_t H, std::size_t cap) {
    game_ = FiniteGame{};
    beliefs_.clear();
    depth_.clear();
    terminal_.clear();
    index_.clear();
    intern(root, 0);
    std::vector<Transition> trans;
    for (std::size_t k = 0; k < beliefs_.size(); ++k) {
      const std::size_t d = depth_[k];
      const StageModel<Game>& m = model(d);
      const double beta = m.discount.continuation;
      const MatrixGame stage = payoff_matrix(m, beliefs_[k]);
      terminal_.push_back(matrix_value(stage, 1e-12) / (1.0 - beta));
      if (d == H) {
        game_.begin_node(1, 1);
        game_.add_cell(0.0, {});
        game_.end_node();
        continue;
      }
      const BeliefMatrix bm = belief_matrix(m.game, beliefs_[k]);
      game_.begin_node(bm.rows, bm.cols);
      for (std::size_t c = 0; c < bm.cells.size(); ++c) {
        trans.clear();
        for (const BeliefBranch& b : bm.cells[c].next) {
          const std::size_t child = intern(b.posterior, d + 1);
          if (beliefs_.size() > cap) return d;
          trans.push_back({static_cast<std::uint32_t>(child), beta * b.prob});
        }
        game_.add_cell(m.discount.payoff_weight * bm.cells[c].payoff, trans);
      }
      game_.end_node();
    }
    return std::nullopt;
  }

  const FiniteGame& game() const { return game_; }
  const std::vector<std::size_t>& depth() const { return depth_; }
  const std::vector<double>& terminal() const { return terminal_; }
  std::size_t size() const { return beliefs_.size(); }

 private:
  std::size_t intern(const Belief& p, std::size_t depth) {
    std::vector<std::int64_t> key = belief_key(p);
    key.push_back(static_cast<std::int64_t>(std::min(depth, prefix_.size())));
    auto [it, inserted] = index_.try_emplace(std::move(key), beliefs_.size());
    if (inserted) {
      beliefs_.push_back(p);
      depth_.push_back(depth);
    }
    return it->second;
  }

  const std::vector<StageModel<Game>>& prefix_;
  const StageModel<Game>& tail_;
  FiniteGame game_;
  std::vector<Belief> beliefs_;
  std::vector<std::size_t> depth_;
  std::vector<double> terminal_;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, BeliefKeyHash> index_;
};

}  // namespace detail

// Truncated expectimax over the tree of beliefs reachable from p0, with stages
// given by prefix and then tail forever. Beliefs equal up to the caching
// quantum share a node within a layer. Leaves get the value of repeating the
// current stage game forever, which is exact for absorbing beliefs.
template <class Game>
TreeResult solve_tree(const std::vector<StageModel<Game>>& prefix, const StageModel<Game>& tail, const Belief& p0,
                      const TreeOptions& opt = {}) {
  if (!(opt.eps > 0.0 && opt.eps < 1.0)) fail(ErrorCode::kInvalidArgument, "eps must lie in (0,1)");
  for (const auto& m : prefix)
    if (!(m.discount.continuation < 1.0)) fail(ErrorCode::kNonContraction, "stage continuation weight must be below 1");
  if (!(tail.discount.continuation < 1.0)) fail(ErrorCode::kNonContraction, "stage continuation weight must be below 1");

  const auto parts = detail::class_parts(tail.game, p0);
  if (parts.size() > 1) {
    TreeResult total;
    for (const auto& [mass, part] : parts) {
      const TreeResult r = solve_tree(prefix, tail, part, opt);
      total.value += mass * r.value;
      total.error_bound += mass * r.error_bound;
      total.nodes += r.nodes;
      total.horizon = std::max(total.horizon, r.horizon);
      total.truncation = std::max(total.truncation, r.truncation);
    }
    return total;
  }

  // A belief that every profile maps back to itself with one payoff c is
  // worth c; summing the geometric series would only add rounding.
  auto absorbed = [&](const StageModel<Game>& m) -> std::optional<double> {
    if (auto c = detail::absorbing_payoff(m.game, p0)) return *c / m.discount.payoff_scale;
    return std::nullopt;
  };
  if (auto c = absorbed(tail)) {
    bool same = true;
    for (const auto& m : prefix) same = same && absorbed(m) == c;
    if (same) {
      TreeResult r;
      r.value = *c;
      r.nodes = 1;
      return r;
    }
  }

  double G = payoff_bound(tail);
  for (const auto& m : prefix) G = std::max(G, payoff_bound(m));
  auto beta_at = [&](std::size_t d) { return d < prefix.size() ? prefix[d].discount.continuation : tail.discount.continuation; };
  // Leaf estimates are off by at most 2G, so truncate at eps / 2.
  std::size_t H = 0;
  double trunc = 1.0;
  while (trunc > 0.5 * opt.eps) {
    trunc *= beta_at(H);
    ++H;
    if (H > 100'000'000) fail(ErrorCode::kBudgetExceeded, "tree horizon too long");
  }
  const std::size_t cap = opt.max_nodes ? opt.max_nodes : detail::max_nodes_from_env();
  detail::TreeBuilder<Game> builder(prefix, tail);
  if (auto overflow = builder.build(p0, H, cap)) {
    if (!opt.fit_budget)
      fail(ErrorCode::kBudgetExceeded, "tree needs more than " + std::to_string(cap) + " nodes (horizon " +
                                           std::to_string(H) + ")");
    H = *overflow;
    if (builder.build(p0, H, cap)) fail(ErrorCode::kBudgetExceeded, "tree rebuild exceeded the node cap");
    trunc = 1.0;
    for (std::size_t d = 0; d < H; ++d) trunc *= beta_at(d);
  }
  const std::vector<double> values =
      solve_finite_horizon(builder.game(), builder.depth(), H, builder.terminal());
  TreeResult r;
  r.value = values[0];
  r.nodes = builder.size();
  r.horizon = H;
  r.truncation = trunc;
  const double dust = G * static_cast<double>(p0.size()) * kBeliefQuantum * static_cast<double>(H);
  r.error_bound = 2.0 * trunc * G + dust;
  return r;
}

template <class Game>
TreeResult solve_tree(const StageModel<Game>& model, const Belief& p0, const TreeOptions& opt = {}) {
  return solve_tree<Game>({}, model, p0, opt);
}

template <class Game>
TreeResult solve_tree(const Game& g, const Belief& p0, double lambda, const StageSchedule& schedule,
                      const TreeOptions& opt = {}) {
  std::vector<StageModel<Game>> prefix;
  for (double h : schedule.prefix) prefix.push_back(make_stage(g, lambda, h));
  return solve_tree(prefix, make_stage(g, lambda, schedule.tail), p0, opt);
}

// ---------------------------------------------------------------------------
// Grid solver

enum class GridMethod { kPolicyIteration, kGaussSeidel };

struct GridOptions {
  std::size_t resolution = 20;
  double tol = 1e-8;
  GridMethod method = GridMethod::kPolicyIteration;
  // Gauss-Seidel only: start every node from -G instead of 0.
  bool start_from_lower_bound = false;
  std::vector<double> initial;
  std::function<void(std::size_t, const std::vector<double>&)> on_iteration;
};

// Fixed point of the backup with continuation values interpolated on a
// simplex grid per class. The error bound is the solver's distance to that
// fixed point plus the largest value jump between neighbouring nodes, which
// estimates the interpolation error.
template <class Game>
GridValueFn solve_grid(const StageModel<Game>& m, const GridOptions& opt = {}) {
  if (!(m.discount.continuation < 1.0)) fail(ErrorCode::kNonContraction, "stage continuation weight must be below 1");
  if (!(opt.tol > 0.0)) fail(ErrorCode::kInvalidArgument, "tolerance must be positive");
  auto classes = detail::state_classes(m.game);
  for (const auto& c : classes)
    if (c.size() > 4) fail(ErrorCode::kDimensionTooHigh, "grid solver supports at most 4 states per class");
  GridValueFn fn(classes, m.game.num_states(), opt.resolution);
  const double beta = m.discount.continuation;

  FiniteGame game;
  Stencil stencil;
  std::vector<Transition> trans;
  for (std::size_t c = 0; c < fn.num_classes(); ++c)
    for (std::size_t k = 0; k < fn.grid(c).size(); ++k) {
      const BeliefMatrix bm = belief_matrix(m.game, fn.node_belief(c, k));
      game.begin_node(bm.rows, bm.cols);
      for (const BeliefCell& cell : bm.cells) {
        trans.clear();
        for (const BeliefBranch& b : cell.next) {
          fn.stencil(b.posterior, stencil);
          for (auto [node, wgt] : stencil) trans.push_back({node, beta * b.prob * wgt});
        }
        game.add_cell(m.discount.payoff_weight * cell.payoff, trans);
      }
      game.end_node();
    }
  game.finalize();

  FiniteSolveOptions fo;
  fo.tol = opt.tol;
  fo.initial = opt.initial;
  fo.on_iteration = opt.on_iteration;
  if (fo.initial.empty() && opt.start_from_lower_bound) fo.initial.assign(fn.num_nodes(), -payoff_bound(m));
  const FiniteSolveResult r =
      opt.method == GridMethod::kGaussSeidel ? solve_gauss_seidel(game, fo) : solve_policy_iteration(game, fo);
  fn.values = r.values;
  fn.iterations = r.iterations;
  fn.error_bound = r.error_bound + fn.max_adjacent_jump();
  return fn;
}

// ---------------------------------------------------------------------------
// Simulation

using Strategy = std::function<std::vector<double>(const Belief&)>;

struct SimulationResult {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t sample(const std::vector<double>& probs, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    acc += probs[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

// Draws (next state, signal) from the true state.
inline std::pair<std::size_t, std::size_t> step(const PartitionSignalGame& g, std::size_t w, std::size_t i,
                                                std::size_t j, std::mt19937_64& rng) {
  auto row = g.row(w, i, j);
  const std::size_t v = sample(std::vector<double>(row.begin(), row.end()), rng);
  return {v, g.partition[v]};
}

inline std::pair<std::size_t, std::size_t> step(const GeneralSignalGame& g, std::size_t w, std::size_t i,
                                                std::size_t j, std::mt19937_64& rng) {
  const auto& outs = g.outcomes(w, i, j);
  std::vector<double> probs;
  for (const Outcome& o : outs) probs.push_back(o.prob);
  const Outcome& o = outs[sample(probs, rng)];
  return {o.state, o.signal};
}

}  // namespace detail

// Monte-Carlo estimate of the normalized payoff truncated after horizon
// stages when player 1 plays sigma and player 2 plays tau on the public
// belief.
template <class Game>
SimulationResult simulate(const StageModel<Game>& m, const Strategy& sigma, const Strategy& tau, const Belief& p0,
                          std::size_t horizon, std::size_t n_paths, std::uint64_t seed) {
  if (n_paths == 0) fail(ErrorCode::kInvalidArgument, "need at least one path");
  if constexpr (std::is_same_v<Game, PartitionSignalGame>) {
    if (m.game.kind != DynamicsKind::kTransition) fail(ErrorCode::kInvalidArgument, "simulation needs transitions");
  }
  std::mt19937_64 rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t path = 0; path < n_paths; ++path) {
    std::size_t state = detail::sample(p0.weights(), rng);
    Belief p = p0;
    double total = 0.0, weight = m.discount.payoff_weight;
    for (std::size_t t = 0; t < horizon; ++t) {
      const std::vector<double> x = sigma(p), y = tau(p);
      const std::size_t i = detail::sample(x, rng), j = detail::sample(y, rng);
      total += weight * m.game.g(state, i, j);
      weight *= m.discount.continuation;
      const auto [next, signal] = detail::step(m.game, state, i, j, rng);
      bool found = false;
      for (BeliefBranch& b : branch(m.game, p, i, j))
        if (b.signal == signal) {
          p = std::move(b.posterior);
          found = true;
          break;
        }
      if (!found) fail(ErrorCode::kInvalidArgument, "simulated signal has zero probability under the belief");
      state = next;
    }
    // Welford update.
    const double delta = total - mean;
    mean += delta / static_cast<double>(path + 1);
    m2 += delta * (total - mean);
  }
  SimulationResult r;
  r.mean = mean;
  r.paths = n_paths;
  r.seed = seed;
  const double var = n_paths > 1 ? m2 / static_cast<double>(n_paths - 1) : 0.0;
  r.half_width = 1.96 * std::sqrt(var / static_cast<double>(n_paths));
  return r;
}

// Smallest horizon with continuation^horizon <= eps.
inline std::size_t truncation_horizon(double continuation, double eps) {
  if (!(continuation > 0.0 && continuation < 1.0) || !(eps > 0.0 && eps < 1.0))
    fail(ErrorCode::kInvalidArgument, "truncation needs continuation and eps in (0,1)");
  return static_cast<std::size_t>(std::ceil(std::log(eps) / std::log(continuation)));
}

// ---------------------------------------------------------------------------
// Perfect observation

namespace detail {

inline void require_perfect(const PartitionSignalGame& g) {
  std::vector<std::size_t> count(g.num_signals(), 0);
  for (std::size_t s : g.partition) ++count[s];
  for (std::size_t c : count)
    if (c != 1) fail(ErrorCode::kInvalidGame, "every signal class must hold exactly one state");
}

// Finite game on the states with reward a g and transition weights b P.
inline FiniteGame state_game(const PartitionSignalGame& g, double a, double b) {
  FiniteGame fg;
  std::vector<Transition> trans;
  for (std::size_t w = 0; w < g.num_states(); ++w) {
    fg.begin_node(g.rows(w), g.cols(w));
    for (std::size_t i = 0; i < g.rows(w); ++i)
      for (std::size_t j = 0; j < g.cols(w); ++j) {
        trans.clear();
        auto row = g.row(w, i, j);
        for (std::size_t v = 0; v < g.num_states(); ++v)
          if (row[v] != 0.0) trans.push_back({static_cast<std::uint32_t>(v), b * row[v]});
        fg.add_cell(a * g.g(w, i, j), trans);
      }
    fg.end_node();
  }
  return fg;
}

}  // namespace detail

struct PerfectSolution {
  std::vector<double> values;
  // Sup-norm residual of v = Val[(lambda g + (I + q) v) / (1 + lambda)].
  double residual = 0.0;
};

// Values of the perfect-observation kernel game as the fixed point of
// v(w) = Val[(lambda g + <(I + q)(w, .), v>) / (1 + lambda)].
inline PerfectSolution solve_perfect(const PartitionSignalGame& q, double lambda) {
  if (q.kind != DynamicsKind::kKernel) fail(ErrorCode::kInvalidArgument, "solve_perfect expects a kernel");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
  detail::require_perfect(q);
  for (std::size_t w = 0; w < q.num_states(); ++w)
    for (std::size_t i = 0; i < q.rows(w); ++i)
      for (std::size_t j = 0; j < q.cols(w); ++j)
        if (1.0 + q.row(w, i, j)[w] < -kStochasticTol)
          fail(ErrorCode::kKernelTooFast, "identity plus kernel has a negative entry");
  const PartitionSignalGame P = kernel_to_transition(q, 1.0);
  const FiniteGame fg = detail::state_game(P, lambda / (1.0 + lambda), 1.0 / (1.0 + lambda));
  FiniteSolveOptions fo;
  fo.tol = 1e-12;
  PerfectSolution s;
  s.values = solve_policy_iteration(fg, fo).values;
  s.residual = bellman_residual(fg, s.values);
  return s;
}

// Values of a perfect-observation stage model (transition form).
inline std::vector<double> solve_perfect_stage(const StageModel<PartitionSignalGame>& m, double tol = 1e-12) {
  if (m.game.kind != DynamicsKind::kTransition) fail(ErrorCode::kInvalidArgument, "stage model needs transitions");
  detail::require_perfect(m.game);
  const FiniteGame fg = detail::state_game(m.game, m.discount.payoff_weight, m.discount.continuation);
  FiniteSolveOptions fo;
  fo.tol = tol;
  return solve_policy_iteration(fg, fo).values;
}

}  // namespace sdg
