#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdg/belief.hpp"
#include "sdg/closed_form.hpp"
#include "sdg/error.hpp"
#include "sdg/finite_game.hpp"
#include "sdg/grid.hpp"
#include "sdg/side.hpp"
#include "sdg/stage_duration.hpp"

namespace sdg {

// One-dimensional recursions for the half games. p is the mass on the second
// transient state given that the play has not left the transient pair.
//
//   minus: -lh + (1-lh) max{ -hp + h(1-p)k + (1-h)v(p),
//                             1/2 v(p - hp/2) + 1/2 v(p + h - hp) }
//   plus:  +lh + (1-lh) min{  hp + h(1-p)k + (1-h)v(p),
//                             1/3 v(p - 2hp/3) + 2/3 v(p + h - hp) }

namespace detail {

inline void check_reduced_args(double lambda, double h, double k) {
  if (!(h > 0.0 && h <= 1.0)) fail(ErrorCode::kInvalidArgument, "stage duration must lie in (0,1]");
  if (!(k >= -1.0 && k <= 1.0)) fail(ErrorCode::kDomainError, "exit payoff must lie in [-1,1]");
  check_discount(lambda, h);
}

struct ReducedMoves {
  double sign;
  // Continue branch: (probability, target) pairs.
  double prob_down, prob_up;
  double down, up;
};

inline ReducedMoves reduced_moves(Side side, double p, double h) {
  if (side == Side::kMinus) return {-1.0, 0.5, 0.5, p - h * p / 2.0, p + h - h * p};
  return {1.0, 1.0 / 3.0, 2.0 / 3.0, p - 2.0 * h * p / 3.0, p + h - h * p};
}

}  // namespace detail

template <class ValueFn>
double reduced_backup(Side side, double p, const ValueFn& v, double lambda, double h, double k) {
  detail::check_reduced_args(lambda, h, k);
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kDomainError, "p must lie in [0,1]");
  const auto mv = detail::reduced_moves(side, p, h);
  const double lh = lambda * h;
  const double quit = mv.sign * h * p + h * (1.0 - p) * k + (1.0 - h) * v(p);
  const double cont = mv.prob_down * v(mv.down) + mv.prob_up * v(mv.up);
  const double inner = side == Side::kMinus ? std::max(quit, cont) : std::min(quit, cont);
  return mv.sign * lh + (1.0 - lh) * inner;
}

// At h = 1 the reachable beliefs from 1 lie on the added chain (see below),
// so a coarse uniform grid suffices there.
inline std::size_t default_reduced_resolution(double h) {
  if (h == 1.0) return 64;
  return std::max<std::size_t>(20'000, static_cast<std::size_t>(std::ceil(10.0 / h)));
}

// At h = 1 the continue branch maps p to p/2 (minus) or p/3 (plus) and 1, so
// the reachable beliefs from 1 form a geometric chain; adding it to the grid
// makes the recursion exact along that chain.
inline std::vector<double> reduced_extra_nodes(Side side, double h) {
  if (h != 1.0) return {};
  const double r = side == Side::kMinus ? 0.5 : 1.0 / 3.0;
  std::vector<double> out{0.0};
  double x = 1.0;
  for (int n = 1; n <= 60; ++n) {
    x *= r;
    out.push_back(x);
  }
  return out;
}

struct ReducedOptions {
  // 0 picks default_reduced_resolution(h).
  std::size_t resolution = 0;
  double tol = 1e-10;
  // Warm start; used when it lives on the same grid.
  const LineValueFn* warm = nullptr;
};

// Fixed point of the recursion with linear interpolation between grid nodes.
// Error bound: solver distance to that fixed point plus the largest jump
// between adjacent nodes.
inline LineValueFn solve_reduced(Side side, double lambda, double h, double k, const ReducedOptions& opt = {}) {
  detail::check_reduced_args(lambda, h, k);
  const std::size_t R = opt.resolution ? opt.resolution : default_reduced_resolution(h);
  LineValueFn fn;
  fn.grid = LineGrid(R, reduced_extra_nodes(side, h));
  const double lh = lambda * h, beta = 1.0 - lh;
  FiniteGame game;
  game.reserve(fn.grid.size(), 2 * fn.grid.size(), 6 * fn.grid.size());
  Stencil sd, su, sq;
  std::vector<Transition> trans;
  for (std::size_t n = 0; n < fn.grid.size(); ++n) {
    const double p = fn.grid.at(n);
    const auto mv = detail::reduced_moves(side, p, h);
    const bool minus = side == Side::kMinus;
    game.begin_node(minus ? 2 : 1, minus ? 1 : 2);
    // Quit.
    trans.clear();
    if (h < 1.0) trans.push_back({static_cast<std::uint32_t>(n), beta * (1.0 - h)});
    game.add_cell(mv.sign * lh + beta * (mv.sign * h * p + h * (1.0 - p) * k), trans);
    // Continue.
    trans.clear();
    fn.grid.interpolate(mv.down, sd);
    fn.grid.interpolate(mv.up, su);
    for (auto [node, wgt] : sd) trans.push_back({node, beta * mv.prob_down * wgt});
    for (auto [node, wgt] : su) trans.push_back({node, beta * mv.prob_up * wgt});
    game.add_cell(mv.sign * lh, trans);
    game.end_node();
  }
  FiniteSolveOptions fo;
  fo.tol = opt.tol;
  if (opt.warm && opt.warm->grid.nodes() == fn.grid.nodes()) fo.initial = opt.warm->values;
  const FiniteSolveResult r = solve_policy_iteration(game, fo);
  fn.values = r.values;
  fn.iterations = r.iterations;
  fn.error_bound = r.error_bound + fn.grid.max_adjacent_jump(fn.values);
  return fn;
}

// Value at a belief over (first, second, star, exit) of the half game with
// exit payoff k, from its reduced value function.
inline double half_value(Side side, double k, const LineValueFn& fn, const Belief& p) {
  if (p.size() != 4) fail(ErrorCode::kDimensionMismatch, "half games have four states");
  const double s = side == Side::kMinus ? -1.0 : 1.0;
  const double m = p[0] + p[1];
  double v = s * p[2] + k * p[3];
  if (m > 0.0) v += m * fn(std::clamp(p[1] / m, 0.0, 1.0));
  return v;
}

struct CoupledResult {
  // Values at the pure second transient states of each side.
  double v_plus = 0.0;
  double v_minus = 0.0;
  LineValueFn plus;
  LineValueFn minus;
  // The same pair from the exit-0 solutions through the affine relations.
  CombinedValues closed{0.0, 0.0};
  std::size_t iterations = 0;
  double error_bound = 0.0;
};

// Two-scalar fixed point a = V+(k = b)(1), b = V-(k = a)(1), by Gauss-Seidel
// from a = b = 0 with warm-started inner solves.
inline CoupledResult solve_coupled_g1(double lambda, double h, const ReducedOptions& opt = {},
                                      std::size_t max_iterations = 100000) {
  CoupledResult out;
  ReducedOptions po = opt, mo = opt;
  double a = 0.0, b = 0.0;
  for (out.iterations = 1;; ++out.iterations) {
    if (out.iterations > max_iterations) fail(ErrorCode::kNoConvergence, "coupled fixed point did not settle");
    po.warm = out.iterations > 1 ? &out.plus : nullptr;
    LineValueFn plus = solve_reduced(Side::kPlus, lambda, h, b, po);
    const double a_new = plus(1.0);
    mo.warm = out.iterations > 1 ? &out.minus : nullptr;
    LineValueFn minus = solve_reduced(Side::kMinus, lambda, h, a_new, mo);
    const double b_new = minus(1.0);
    const double delta = std::max(std::abs(a_new - a), std::abs(b_new - b));
    a = a_new;
    b = b_new;
    out.plus = std::move(plus);
    out.minus = std::move(minus);
    if (delta <= opt.tol) {
      out.error_bound = std::max(out.plus.error_bound, out.minus.error_bound) + delta;
      break;
    }
  }
  out.v_plus = a;
  out.v_minus = b;
  ReducedOptions zo = opt;
  zo.warm = nullptr;
  const double vp0 = solve_reduced(Side::kPlus, lambda, h, 0.0, zo)(1.0);
  const double vm0 = solve_reduced(Side::kMinus, lambda, h, 0.0, zo)(1.0);
  out.closed = combine_half_values(vm0, vp0);
  return out;
}

// Value of the two-sided example at a belief over (+, ++, +*, -, --, -*).
inline double g1_value(const CoupledResult& c, const Belief& p) {
  if (p.size() != 6) fail(ErrorCode::kDimensionMismatch, "the two-sided example has six states");
  double v = p[2] - p[5];
  const double mp = p[0] + p[1], mm = p[3] + p[4];
  if (mp > 0.0) v += mp * c.plus(std::clamp(p[1] / mp, 0.0, 1.0));
  if (mm > 0.0) v += mm * c.minus(std::clamp(p[4] / mm, 0.0, 1.0));
  return v;
}

// ---------------------------------------------------------------------------
// Line reduction for state-blind games with two transient states

struct BlindLine {
  std::size_t first = 0, second = 0;
  // Normalized value of each state when absorbing, 0 for the transient pair.
  std::vector<double> absorbing_value;
  LineValueFn fn;

  double operator()(const Belief& p) const {
    double v = 0.0;
    for (std::size_t w = 0; w < p.size(); ++w) v += p[w] * absorbing_value[w];
    const double m = p[first] + p[second];
    if (m > 0.0) v += m * fn(std::clamp(p[second] / m, 0.0, 1.0));
    return v;
  }
};

// In a one-signal game whose states other than first and second are
// absorbing with action-independent payoff, the belief moves
// deterministically and the absorbed mass only adds a constant. The value is
// then the absorbed part plus the transient mass times a function of the
// share of the second state.
inline BlindLine solve_blind_line(const StageModel<PartitionSignalGame>& m, std::size_t first, std::size_t second,
                                  std::size_t resolution, double tol = 1e-10) {
  const PartitionSignalGame& g = m.game;
  if (g.kind != DynamicsKind::kTransition) fail(ErrorCode::kInvalidArgument, "line reduction needs transitions");
  if (g.num_signals() != 1) fail(ErrorCode::kInvalidGame, "line reduction needs a state-blind game");
  const std::size_t n = g.num_states();
  if (first >= n || second >= n || first == second) fail(ErrorCode::kInvalidArgument, "bad transient pair");
  const double beta = m.discount.continuation, pw = m.discount.payoff_weight;
  if (!(beta < 1.0)) fail(ErrorCode::kNonContraction, "stage continuation weight must be below 1");
  BlindLine out;
  out.first = first;
  out.second = second;
  out.absorbing_value.assign(n, 0.0);
  const std::size_t rows = g.rows(0), cols = g.cols(0);
  for (std::size_t w = 0; w < n; ++w) {
    if (w == first || w == second) continue;
    const double c = g.g(w, 0, 0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (g.row(w, i, j)[w] != 1.0 || g.g(w, i, j) != c)
          fail(ErrorCode::kInvalidGame, "state " + g.states[w] + " is not absorbing with a constant payoff");
    out.absorbing_value[w] = pw * c / (1.0 - beta);
  }
  out.fn.grid = LineGrid(resolution);
  FiniteGame game;
  Stencil st;
  std::vector<Transition> trans;
  for (std::size_t k = 0; k < out.fn.grid.size(); ++k) {
    const double x = out.fn.grid.at(k);
    game.begin_node(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const auto r1 = g.row(first, i, j), r2 = g.row(second, i, j);
        double reward = pw * ((1.0 - x) * g.g(first, i, j) + x * g.g(second, i, j));
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
          const double mass = (1.0 - x) * r1[v] + x * r2[v];
          if (v == first) m1 += mass;
          else if (v == second) m2 += mass;
          else reward += beta * mass * out.absorbing_value[v];
        }
        trans.clear();
        if (m1 + m2 > 0.0) {
          out.fn.grid.interpolate(m2 / (m1 + m2), st);
          for (auto [node, wgt] : st) trans.push_back({node, beta * (m1 + m2) * wgt});
        }
        game.add_cell(reward, trans);
      }
    game.end_node();
  }
  FiniteSolveOptions fo;
  fo.tol = tol;
  const FiniteSolveResult r = solve_policy_iteration(game, fo);
  out.fn.values = r.values;
  out.fn.iterations = r.iterations;
  out.fn.error_bound = r.error_bound + out.fn.grid.max_adjacent_jump(out.fn.values);
  return out;
}

}  // namespace sdg
