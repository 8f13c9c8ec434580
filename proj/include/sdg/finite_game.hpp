#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sdg/error.hpp"
#include "sdg/matrix_game.hpp"

namespace sdg {

struct Transition {
  std::uint32_t node = 0;
  double weight = 0.0;
};

// A finite discounted stochastic game with perfect observation of the node.
// Each node carries an m x n matrix of cells; a cell is a reward plus a
// substochastic transition list whose weights already include the discount.
// Duplicate rows or columns of a node are dropped on insertion; they do not
// change the node's matrix-game value.
class FiniteGame {
 public:
  std::size_t num_nodes() const { return rows_.size(); }
  std::size_t rows(std::size_t node) const { return rows_[node]; }
  std::size_t cols(std::size_t node) const { return cols_[node]; }
  std::size_t cell(std::size_t node, std::size_t i, std::size_t j) const {
    return cell_begin_[node] + i * cols_[node] + j;
  }
  double reward(std::size_t c) const { return reward_[c]; }
  std::span<const Transition> next(std::size_t c) const {
    return {trans_.data() + trans_begin_[c], trans_begin_[c + 1] - trans_begin_[c]};
  }
  // Largest total transition weight of any cell.
  double modulus() const { return modulus_; }
  std::size_t num_transitions() const { return trans_.size(); }

  void reserve(std::size_t nodes, std::size_t cells, std::size_t transitions) {
    rows_.reserve(nodes);
    cols_.reserve(nodes);
    cell_begin_.reserve(nodes + 1);
    reward_.reserve(cells);
    trans_begin_.reserve(cells + 1);
    trans_.reserve(transitions);
  }

  void begin_node(std::size_t rows, std::size_t cols) {
    pending_rows_ = rows;
    pending_cols_ = cols;
    pending_.clear();
  }

  // Cells are added in row-major order after begin_node.
  void add_cell(double reward, std::span<const Transition> next) {
    PendingCell c{reward, {next.begin(), next.end()}};
    std::sort(c.next.begin(), c.next.end(), [](const Transition& a, const Transition& b) { return a.node < b.node; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < c.next.size(); ++k) {
      if (out > 0 && c.next[out - 1].node == c.next[k].node) c.next[out - 1].weight += c.next[k].weight;
      else c.next[out++] = c.next[k];
    }
    c.next.resize(out);
    std::erase_if(c.next, [](const Transition& t) { return t.weight == 0.0; });
    pending_.push_back(std::move(c));
  }

  void end_node() {
    if (pending_.size() != pending_rows_ * pending_cols_)
      fail(ErrorCode::kDimensionMismatch, "node has the wrong number of cells");
    const std::size_t m = pending_rows_, n = pending_cols_;
    auto same = [&](std::size_t a, std::size_t b) {
      const PendingCell& x = pending_[a];
      const PendingCell& y = pending_[b];
      if (x.reward != y.reward || x.next.size() != y.next.size()) return false;
      for (std::size_t k = 0; k < x.next.size(); ++k)
        if (x.next[k].node != y.next[k].node || x.next[k].weight != y.next[k].weight) return false;
      return true;
    };
    std::vector<std::size_t> keep_rows, keep_cols;
    for (std::size_t i = 0; i < m; ++i) {
      bool dup = false;
      for (std::size_t r : keep_rows) {
        bool all = true;
        for (std::size_t j = 0; j < n && all; ++j) all = same(i * n + j, r * n + j);
        if (all) {
          dup = true;
          break;
        }
      }
      if (!dup) keep_rows.push_back(i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      bool dup = false;
      for (std::size_t c : keep_cols) {
        bool all = true;
        for (std::size_t i : keep_rows) all = all && same(i * n + j, i * n + c);
        if (all) {
          dup = true;
          break;
        }
      }
      if (!dup) keep_cols.push_back(j);
    }
    if (cell_begin_.empty()) {
      cell_begin_.push_back(0);
      trans_begin_.push_back(0);
    }
    rows_.push_back(static_cast<std::uint32_t>(keep_rows.size()));
    cols_.push_back(static_cast<std::uint32_t>(keep_cols.size()));
    for (std::size_t i : keep_rows)
      for (std::size_t j : keep_cols) {
        const PendingCell& c = pending_[i * n + j];
        reward_.push_back(c.reward);
        double total = 0.0;
        for (const Transition& t : c.next) {
          trans_.push_back(t);
          total += t.weight;
        }
        modulus_ = std::max(modulus_, total);
        trans_begin_.push_back(trans_.size());
      }
    cell_begin_.push_back(reward_.size());
    pending_.clear();
  }

  // Checks that every transition target exists.
  void finalize() const {
    for (const Transition& t : trans_)
      if (t.node >= num_nodes()) fail(ErrorCode::kInvalidArgument, "transition to a missing node");
  }

 private:
  struct PendingCell {
    double reward;
    std::vector<Transition> next;
  };
  std::vector<std::uint32_t> rows_, cols_;
  std::vector<std::size_t> cell_begin_;
  std::vector<double> reward_;
  std::vector<std::size_t> trans_begin_;
  std::vector<Transition> trans_;
  double modulus_ = 0.0;
  std::size_t pending_rows_ = 0, pending_cols_ = 0;
  std::vector<PendingCell> pending_;
};

struct FiniteSolveOptions {
  // Target sup-norm distance to the fixed point.
  double tol = 1e-9;
  std::size_t max_iterations = 10'000'000;
  // Warm start; empty means zeros (or the lower bound for Gauss-Seidel if set).
  std::vector<double> initial;
  // Called after every sweep (Gauss-Seidel) or outer step (policy iteration).
  std::function<void(std::size_t, const std::vector<double>&)> on_iteration;
};

struct FiniteSolveResult {
  std::vector<double> values;
  std::size_t iterations = 0;
  // Certified sup-norm distance to the exact fixed point.
  double error_bound = 0.0;
};

namespace detail {

struct NodeScratch {
  std::vector<double> matrix, x, y;
  SimplexWorkspace ws;
};

// Value of node's matrix game at continuation v; fills s.x and s.y.
inline double node_value(const FiniteGame& g, std::size_t node, const std::vector<double>& v, NodeScratch& s) {
  const std::size_t m = g.rows(node), n = g.cols(node);
  s.matrix.resize(m * n);
  s.x.resize(m);
  s.y.resize(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = g.cell(node, i, j);
      double val = g.reward(c);
      for (const Transition& t : g.next(c)) val += t.weight * v[t.node];
      s.matrix[i * n + j] = val;
    }
  double gap = 0.0;
  return solve_raw(s.matrix.data(), m, n, 1e-12, s.x.data(), s.y.data(), gap, s.ws, 0.0);
}

inline void check_modulus(const FiniteGame& g) {
  if (!(g.modulus() < 1.0)) fail(ErrorCode::kNonContraction, "transition weights do not contract");
}

}  // namespace detail

// One Jacobi application of the Shapley operator.
inline std::vector<double> apply_operator(const FiniteGame& g, const std::vector<double>& v) {
  detail::NodeScratch s;
  std::vector<double> out(g.num_nodes());
  for (std::size_t k = 0; k < g.num_nodes(); ++k) out[k] = detail::node_value(g, k, v, s);
  return out;
}

inline double bellman_residual(const FiniteGame& g, const std::vector<double>& v) {
  std::vector<double> tv = apply_operator(g, v);
  double r = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) r = std::max(r, std::abs(tv[k] - v[k]));
  return r;
}

// In-place sweeps until the sup-norm update is at most tol (1 - b) / b, where b
// is the contraction modulus.
inline FiniteSolveResult solve_gauss_seidel(const FiniteGame& g, const FiniteSolveOptions& opt = {}) {
  detail::check_modulus(g);
  const double beta = g.modulus();
  FiniteSolveResult r;
  r.values = opt.initial.empty() ? std::vector<double>(g.num_nodes(), 0.0) : opt.initial;
  if (r.values.size() != g.num_nodes()) fail(ErrorCode::kDimensionMismatch, "warm start has the wrong size");
  const double stop = beta > 0.0 ? opt.tol * (1.0 - beta) / beta : std::numeric_limits<double>::infinity();
  detail::NodeScratch s;
  for (r.iterations = 1;; ++r.iterations) {
    double delta = 0.0;
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      const double nv = detail::node_value(g, k, r.values, s);
      delta = std::max(delta, std::abs(nv - r.values[k]));
      r.values[k] = nv;
    }
    if (opt.on_iteration) opt.on_iteration(r.iterations, r.values);
    if (delta <= stop) {
      r.error_bound = beta > 0.0 ? delta * beta / (1.0 - beta) : 0.0;
      return r;
    }
    if (r.iterations >= opt.max_iterations)
      fail(ErrorCode::kNoConvergence, "value iteration did not reach the tolerance");
  }
}

// Policy iteration for the game. Each outer step solves every node's matrix
// game at the current v. A Newton step evaluates the resulting stationary
// pair (x, y) exactly and is kept when it at least halves the Bellman
// residual; otherwise a Hoffman-Karp step runs: player 2 keeps y and player 1
// best-responds exactly by Howard policy iteration. Evaluations use sparse LU.
inline FiniteSolveResult solve_policy_iteration(const FiniteGame& g, const FiniteSolveOptions& opt = {}) {
  detail::check_modulus(g);
  const std::size_t N = g.num_nodes();
  const double beta = g.modulus();
  FiniteSolveResult r;
  std::vector<double>& v = r.values;
  v = opt.initial.empty() ? std::vector<double>(N, 0.0) : opt.initial;
  if (v.size() != N) fail(ErrorCode::kDimensionMismatch, "warm start has the wrong size");

  std::vector<std::size_t> x_begin(N + 1, 0), y_begin(N + 1, 0);
  for (std::size_t k = 0; k < N; ++k) {
    x_begin[k + 1] = x_begin[k] + g.rows(k);
    y_begin[k + 1] = y_begin[k] + g.cols(k);
  }
  std::vector<double> x(x_begin[N]), y(y_begin[N]), cand_x(x.size()), cand_y(y.size());
  std::vector<std::uint32_t> policy(N, 0);
  detail::NodeScratch s;

  // Residual |Tv - v| at w; stores the node strategies in xs, ys.
  auto sweep = [&](const std::vector<double>& w, std::vector<double>& xs, std::vector<double>& ys) {
    double res = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double tv = detail::node_value(g, k, w, s);
      res = std::max(res, std::abs(tv - w[k]));
      std::copy(s.x.begin(), s.x.end(), xs.begin() + static_cast<std::ptrdiff_t>(x_begin[k]));
      std::copy(s.y.begin(), s.y.end(), ys.begin() + static_cast<std::ptrdiff_t>(y_begin[k]));
    }
    return res;
  };

  // Player 1's action values against y at continuation v.
  auto row_value = [&](std::size_t k, std::size_t i) {
    double q = 0.0;
    for (std::size_t j = 0; j < g.cols(k); ++j) {
      const double yj = y[y_begin[k] + j];
      if (yj == 0.0) continue;
      const std::size_t c = g.cell(k, i, j);
      double val = g.reward(c);
      for (const Transition& t : g.next(c)) val += t.weight * v[t.node];
      q += yj * val;
    }
    return q;
  };

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  const bool iterative = N > 2000 && beta <= 0.99;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b(static_cast<Eigen::Index>(N));
  // Value of the stationary pair where node k plays row weights xw(k, i)
  // against y.
  auto evaluate = [&](const auto& xw, std::vector<double>& out) {
    trip.clear();
    for (std::size_t k = 0; k < N; ++k) {
      const auto kk = static_cast<int>(k);
      trip.emplace_back(kk, kk, 1.0);
      double rew = 0.0;
      for (std::size_t i = 0; i < g.rows(k); ++i) {
        const double xi = xw(k, i);
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < g.cols(k); ++j) {
          const double p = xi * y[y_begin[k] + j];
          if (p == 0.0) continue;
          const std::size_t c = g.cell(k, i, j);
          rew += p * g.reward(c);
          for (const Transition& t : g.next(c)) trip.emplace_back(kk, static_cast<int>(t.node), -p * t.weight);
        }
      }
      b[static_cast<Eigen::Index>(k)] = rew;
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    if (iterative) {
      // Long jumps make LU fill in badly, but with beta this small plain
      // Gauss-Seidel on v = b + P v converges in a few hundred sweeps.
      const Eigen::SparseMatrix<double, Eigen::RowMajor> R = A;
      out.resize(N);
      for (std::size_t k = 0; k < N; ++k) out[k] = v[k];
      for (std::size_t sweep_no = 0;; ++sweep_no) {
        if (sweep_no >= 100000) fail(ErrorCode::kNoConvergence, "policy evaluation did not converge");
        double change = 0.0, scale = 1.0;
        for (Eigen::Index k = 0; k < R.outerSize(); ++k) {
          double acc = b[k], diag = 0.0;
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(R, k); it; ++it) {
            if (it.col() == k) diag = it.value();
            else acc -= it.value() * out[static_cast<std::size_t>(it.col())];
          }
          const double nv = acc / diag;
          change = std::max(change, std::abs(nv - out[static_cast<std::size_t>(k)]));
          scale = std::max(scale, std::abs(nv));
          out[static_cast<std::size_t>(k)] = nv;
        }
        if (change * beta / (1.0 - beta) <= 1e-15 * scale) return;
      }
    }
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) fail(ErrorCode::kSingularSystem, "policy evaluation system is singular");
    Eigen::VectorXd sol = lu.solve(b);
    // One step of iterative refinement keeps near-singular systems accurate.
    Eigen::VectorXd res = b - A * sol;
    sol += lu.solve(res);
    out.resize(N);
    for (std::size_t k = 0; k < N; ++k) out[k] = sol[static_cast<Eigen::Index>(k)];
  };
  auto mixed = [&](std::size_t k, std::size_t i) { return x[x_begin[k] + i]; };
  auto pure = [&](std::size_t k, std::size_t i) { return i == policy[k] ? 1.0 : 0.0; };

  const std::size_t max_inner = 1000;
  std::vector<double> candidate, previous_v;
  double residual = sweep(v, x, y);
  for (r.iterations = 1;; ++r.iterations) {
    if (opt.on_iteration) opt.on_iteration(r.iterations, v);
    r.error_bound = residual / (1.0 - beta);
    if (r.error_bound <= opt.tol) return r;
    if (r.iterations >= opt.max_iterations)
      fail(ErrorCode::kNoConvergence, "policy iteration did not reach the tolerance");
    previous_v = v;

    evaluate(mixed, candidate);
    const double cand_residual = sweep(candidate, cand_x, cand_y);
    if (cand_residual <= 0.5 * residual) {
      v.swap(candidate);
      x.swap(cand_x);
      y.swap(cand_y);
      residual = cand_residual;
      continue;
    }

    for (std::size_t k = 0; k < N; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < g.rows(k); ++i) {
        const double q = row_value(k, i);
        if (q > best) {
          best = q;
          policy[k] = static_cast<std::uint32_t>(i);
        }
      }
    }
    for (std::size_t inner = 0;; ++inner) {
      if (inner >= max_inner) fail(ErrorCode::kNoConvergence, "best-response iteration did not settle");
      evaluate(pure, v);
      bool changed = false;
      for (std::size_t k = 0; k < N; ++k) {
        if (g.rows(k) == 1) continue;
        const double current = row_value(k, policy[k]);
        for (std::size_t i = 0; i < g.rows(k); ++i) {
          if (i == policy[k]) continue;
          if (row_value(k, i) > current + 1e-14 * (1.0 + std::abs(current))) {
            policy[k] = static_cast<std::uint32_t>(i);
            changed = true;
            break;
          }
        }
      }
      if (!changed) break;
    }
    const std::vector<double> old_y = y;
    residual = sweep(v, x, y);
    // An outer step that did not move v, or that reproduced the same column
    // strategy, leaves only rounding to remove.
    double scale = 1.0, moved = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      scale = std::max(scale, std::abs(v[k]));
      moved = std::max(moved, std::abs(v[k] - previous_v[k]));
    }
    if (moved <= 1e-13 * scale || y == old_y) {
      r.error_bound = residual / (1.0 - beta);
      if (opt.on_iteration) opt.on_iteration(r.iterations + 1, v);
      ++r.iterations;
      return r;
    }
  }
}

// Values with remaining horizon 0..H by backward induction, restricted to the
// nodes whose depth allows it: node k is evaluated for r <= H - depth[k].
// terminal holds the values at remaining horizon 0 (empty means zeros).
// Returns values with remaining horizon H - depth[k].
inline std::vector<double> solve_finite_horizon(const FiniteGame& g, const std::vector<std::size_t>& depth,
                                                std::size_t horizon, const std::vector<double>& terminal = {}) {
  const std::size_t N = g.num_nodes();
  std::vector<double> prev = terminal.empty() ? std::vector<double>(N, 0.0) : terminal;
  if (prev.size() != N) fail(ErrorCode::kDimensionMismatch, "terminal values have the wrong size");
  std::vector<double> cur = prev, answer = prev;
  detail::NodeScratch s;
  for (std::size_t r = 1; r <= horizon; ++r) {
    for (std::size_t k = 0; k < N; ++k) {
      if (depth[k] + r > horizon) continue;
      cur[k] = detail::node_value(g, k, prev, s);
      if (depth[k] + r == horizon) answer[k] = cur[k];
    }
    std::swap(prev, cur);
  }
  return answer;
}

}  // namespace sdg
