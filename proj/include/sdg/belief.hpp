#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sdg/error.hpp"
#include "sdg/game_model.hpp"

namespace sdg {

inline constexpr double kBeliefDust = 1e-14;
inline constexpr double kBeliefQuantum = 1e-12;

class Belief {
 public:
  Belief() = default;

  // Clamps dust >= -1e-14 to zero and renormalizes; anything else that is not
  // a distribution within 1e-12 is a DomainError.
  explicit Belief(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) fail(ErrorCode::kDomainError, "empty belief");
    double sum = 0.0;
    for (double& x : w_) {
      if (!std::isfinite(x)) fail(ErrorCode::kNonFinite, "belief entry is not finite");
      if (x < -kBeliefDust) fail(ErrorCode::kDomainError, "negative belief entry");
      if (x < 0.0) x = 0.0;
      sum += x;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) fail(ErrorCode::kDomainError, "belief does not sum to 1");
    for (double& x : w_) x /= sum;
  }

  static Belief point(std::size_t n, std::size_t k) {
    std::vector<double> w(n, 0.0);
    w.at(k) = 1.0;
    return Belief(std::move(w));
  }

  // Scales a nonnegative mass vector to a distribution.
  static Belief normalized(std::vector<double> mass) {
    double sum = 0.0;
    for (double& x : mass) {
      if (x < 0.0) x = 0.0;
      sum += x;
    }
    if (!(sum > 0.0)) fail(ErrorCode::kDomainError, "cannot normalize zero mass");
    for (double& x : mass) x /= sum;
    return Belief(std::move(mass));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t k) const { return w_[k]; }
  const std::vector<double>& weights() const { return w_; }

  bool operator==(const Belief&) const = default;

 private:
  std::vector<double> w_;
};

// Coordinates rounded to the caching quantum; equal keys mean the same node.
inline std::vector<std::int64_t> belief_key(const Belief& p, double quantum = kBeliefQuantum) {
  std::vector<std::int64_t> key(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) key[k] = std::llround(p[k] / quantum);
  return key;
}

struct BeliefKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : key) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct BeliefBranch {
  std::size_t signal = 0;
  double prob = 0.0;
  Belief posterior;
};

// Signal class containing the support of p; mixed supports are not admissible
// because action sets differ across classes.
inline std::size_t support_class(const PartitionSignalGame& g, const Belief& p) {
  if (p.size() != g.num_states()) fail(ErrorCode::kDimensionMismatch, "belief size does not match the game");
  std::size_t cls = g.num_signals();
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (p[w] <= 0.0) continue;
    if (cls == g.num_signals()) cls = g.partition[w];
    else if (g.partition[w] != cls)
      fail(ErrorCode::kActionNotAdmissible, "belief support spans several signal classes");
  }
  return cls;
}

inline void check_profile(const PartitionSignalGame& g, const Belief& p, std::size_t i, std::size_t j) {
  const std::size_t cls = support_class(g, p);
  if (i >= g.actions1[cls].size() || j >= g.actions2[cls].size())
    fail(ErrorCode::kActionNotAdmissible, "action profile outside the admissible sets");
}

inline void check_profile(const GeneralSignalGame& g, const Belief& p, std::size_t i, std::size_t j) {
  if (p.size() != g.num_states()) fail(ErrorCode::kDimensionMismatch, "belief size does not match the game");
  if (i >= g.rows() || j >= g.cols()) fail(ErrorCode::kActionNotAdmissible, "action profile out of range");
}

template <class Game>
double expected_payoff(const Game& g, const Belief& p, std::size_t i, std::size_t j) {
  check_profile(g, p, i, j);
  double s = 0.0;
  for (std::size_t w = 0; w < p.size(); ++w)
    if (p[w] > 0.0) s += p[w] * g.g(w, i, j);
  return s;
}

// Joint law of (next state, signal) as a dense |signals| x |states| table.
inline std::vector<double> joint_next(const PartitionSignalGame& g, const Belief& p, std::size_t i, std::size_t j) {
  if (g.kind != DynamicsKind::kTransition)
    fail(ErrorCode::kInvalidArgument, "belief transitions need a game in transition form");
  check_profile(g, p, i, j);
  const std::size_t n = g.num_states();
  std::vector<double> joint(g.num_signals() * n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    if (p[w] <= 0.0) continue;
    auto row = g.row(w, i, j);
    for (std::size_t v = 0; v < n; ++v)
      if (row[v] > 0.0) joint[g.partition[v] * n + v] += p[w] * row[v];
  }
  return joint;
}

inline std::vector<double> joint_next(const GeneralSignalGame& g, const Belief& p, std::size_t i, std::size_t j) {
  check_profile(g, p, i, j);
  const std::size_t n = g.num_states();
  std::vector<double> joint(g.num_signals() * n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    if (p[w] <= 0.0) continue;
    for (const Outcome& o : g.outcomes(w, i, j)) joint[o.signal * n + o.state] += p[w] * o.prob;
  }
  return joint;
}

// One-stage marginal law of the next state.
template <class Game>
std::vector<double> next_state_law(const Game& g, const Belief& p, std::size_t i, std::size_t j) {
  const std::size_t n = g.num_states();
  std::vector<double> joint = joint_next(g, p, i, j);
  std::vector<double> law(n, 0.0);
  for (std::size_t s = 0; s < g.num_signals(); ++s)
    for (std::size_t v = 0; v < n; ++v) law[v] += joint[s * n + v];
  return law;
}

// One branch per signal with positive probability, in signal order.
template <class Game>
std::vector<BeliefBranch> branch(const Game& g, const Belief& p, std::size_t i, std::size_t j) {
  const std::size_t n = g.num_states();
  std::vector<double> joint = joint_next(g, p, i, j);
  std::vector<BeliefBranch> out;
  for (std::size_t s = 0; s < g.num_signals(); ++s) {
    const double* row = joint.data() + s * n;
    const double mass = std::accumulate(row, row + n, 0.0);
    if (!(mass > 0.0)) continue;
    std::vector<double> post(row, row + n);
    for (double& x : post) x /= mass;
    out.push_back({s, mass, Belief::normalized(std::move(post))});
  }
  return out;
}

// (p * q)(x) = sum_x' p(x') q(x', x) for profile (i, j). p may be any mass
// vector, not only a distribution.
inline std::vector<double> drift(std::span<const double> p, const PartitionSignalGame& q, std::size_t i,
                                 std::size_t j) {
  if (q.kind != DynamicsKind::kKernel) fail(ErrorCode::kInvalidArgument, "drift expects a kernel");
  const std::size_t n = q.num_states();
  if (p.size() != n) fail(ErrorCode::kDimensionMismatch, "mass vector size does not match the kernel");
  std::vector<double> out(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    if (p[w] == 0.0) continue;
    if (i >= q.rows(w) || j >= q.cols(w))
      fail(ErrorCode::kActionNotAdmissible, "action profile outside the admissible sets");
    auto row = q.row(w, i, j);
    for (std::size_t v = 0; v < n; ++v) out[v] += p[w] * row[v];
  }
  return out;
}

}  // namespace sdg
