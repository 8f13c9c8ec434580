#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sdg/error.hpp"

namespace sdg {

inline constexpr double kStochasticTol = 1e-12;

enum class DynamicsKind { kKernel, kTransition };

namespace detail {

inline std::size_t find_name(const std::vector<std::string>& names, std::string_view name,
                             std::string_view what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(ErrorCode::kInvalidArgument, "unknown " + std::string(what) + " '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace detail

// Signal equals the partition cell of the new state. Action sets depend on the
// current signal, so every per-state table is laid out over that state's
// I_f(w) x J_f(w) profiles in row-major order.
struct PartitionSignalGame {
  std::vector<std::string> states;
  std::vector<std::string> signals;
  std::vector<std::size_t> partition;
  std::vector<std::vector<std::string>> actions1;
  std::vector<std::vector<std::string>> actions2;
  // payoff[w][i * cols(w) + j]
  std::vector<std::vector<double>> payoff;
  DynamicsKind kind = DynamicsKind::kTransition;
  // dynamics[w][(i * cols(w) + j) * num_states() + w'] holds P or q.
  std::vector<std::vector<double>> dynamics;

  // Zero payoffs; identity transitions or zero kernel.
  static PartitionSignalGame create(std::vector<std::string> states, std::vector<std::string> signals,
                                    std::vector<std::size_t> partition,
                                    std::vector<std::vector<std::string>> actions1,
                                    std::vector<std::vector<std::string>> actions2, DynamicsKind kind) {
    PartitionSignalGame g;
    g.states = std::move(states);
    g.signals = std::move(signals);
    g.partition = std::move(partition);
    g.actions1 = std::move(actions1);
    g.actions2 = std::move(actions2);
    g.kind = kind;
    if (g.partition.size() != g.states.size() || g.actions1.size() != g.signals.size() ||
        g.actions2.size() != g.signals.size())
      fail(ErrorCode::kDimensionMismatch, "partition/action tables do not match states/signals");
    for (std::size_t s : g.partition)
      if (s >= g.signals.size()) fail(ErrorCode::kInvalidGame, "partition refers to a missing signal");
    const std::size_t n = g.states.size();
    g.payoff.resize(n);
    g.dynamics.resize(n);
    for (std::size_t w = 0; w < n; ++w) {
      const std::size_t cells = g.rows(w) * g.cols(w);
      g.payoff[w].assign(cells, 0.0);
      g.dynamics[w].assign(cells * n, 0.0);
      if (kind == DynamicsKind::kTransition)
        for (std::size_t c = 0; c < cells; ++c) g.dynamics[w][c * n + w] = 1.0;
    }
    return g;
  }

  std::size_t num_states() const { return states.size(); }
  std::size_t num_signals() const { return signals.size(); }
  std::size_t rows(std::size_t w) const { return actions1[partition[w]].size(); }
  std::size_t cols(std::size_t w) const { return actions2[partition[w]].size(); }

  double g(std::size_t w, std::size_t i, std::size_t j) const { return payoff[w][i * cols(w) + j]; }
  double& g(std::size_t w, std::size_t i, std::size_t j) { return payoff[w][i * cols(w) + j]; }

  std::span<const double> row(std::size_t w, std::size_t i, std::size_t j) const {
    return {dynamics[w].data() + (i * cols(w) + j) * num_states(), num_states()};
  }
  std::span<double> row(std::size_t w, std::size_t i, std::size_t j) {
    return {dynamics[w].data() + (i * cols(w) + j) * num_states(), num_states()};
  }

  // States whose signal is s, in state order.
  std::vector<std::size_t> class_states(std::size_t s) const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < num_states(); ++w)
      if (partition[w] == s) out.push_back(w);
    return out;
  }

  std::size_t state_index(std::string_view name) const { return detail::find_name(states, name, "state"); }
  std::size_t signal_index(std::string_view name) const { return detail::find_name(signals, name, "signal"); }

  bool operator==(const PartitionSignalGame&) const = default;
};

struct Outcome {
  std::size_t state = 0;
  std::size_t signal = 0;
  double prob = 0.0;

  bool operator==(const Outcome&) const = default;
};

// Transitions emit (next state, signal) jointly; action sets are global.
struct GeneralSignalGame {
  std::vector<std::string> states;
  std::vector<std::string> signals;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  // payoff[w][i * actions2.size() + j]
  std::vector<std::vector<double>> payoff;
  // transitions[w][i * actions2.size() + j]
  std::vector<std::vector<std::vector<Outcome>>> transitions;
  // Padding bookkeeping: source1[w][i] is the original action index that
  // global action i stands for in state w. Empty when no padding happened.
  std::vector<std::vector<std::size_t>> source1;
  std::vector<std::vector<std::size_t>> source2;

  static GeneralSignalGame create(std::vector<std::string> states, std::vector<std::string> signals,
                                  std::vector<std::string> actions1, std::vector<std::string> actions2) {
    GeneralSignalGame g;
    g.states = std::move(states);
    g.signals = std::move(signals);
    g.actions1 = std::move(actions1);
    g.actions2 = std::move(actions2);
    const std::size_t cells = g.actions1.size() * g.actions2.size();
    g.payoff.assign(g.states.size(), std::vector<double>(cells, 0.0));
    g.transitions.assign(g.states.size(), std::vector<std::vector<Outcome>>(cells));
    return g;
  }

  std::size_t num_states() const { return states.size(); }
  std::size_t num_signals() const { return signals.size(); }
  std::size_t rows(std::size_t = 0) const { return actions1.size(); }
  std::size_t cols(std::size_t = 0) const { return actions2.size(); }

  double g(std::size_t w, std::size_t i, std::size_t j) const { return payoff[w][i * cols() + j]; }
  double& g(std::size_t w, std::size_t i, std::size_t j) { return payoff[w][i * cols() + j]; }

  const std::vector<Outcome>& outcomes(std::size_t w, std::size_t i, std::size_t j) const {
    return transitions[w][i * cols() + j];
  }
  std::vector<Outcome>& outcomes(std::size_t w, std::size_t i, std::size_t j) {
    return transitions[w][i * cols() + j];
  }

  bool is_duplicate1(std::size_t w, std::size_t i) const { return !source1.empty() && source1[w][i] != i; }
  bool is_duplicate2(std::size_t w, std::size_t j) const { return !source2.empty() && source2[w][j] != j; }

  std::size_t state_index(std::string_view name) const { return detail::find_name(states, name, "state"); }
  std::size_t signal_index(std::string_view name) const { return detail::find_name(signals, name, "signal"); }

  bool operator==(const GeneralSignalGame&) const = default;
};

// Marginal law of the next state plus a signalling law per state pair.
struct SplitDynamics {
  std::vector<std::string> states;
  std::vector<std::string> signals;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<std::vector<double>> payoff;
  // marginal[w][ij][w']
  std::vector<std::vector<std::vector<double>>> marginal;
  // signalling[w][ij][w' * num_signals + a]
  std::vector<std::vector<std::vector<double>>> signalling;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_signals() const { return signals.size(); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  // Largest exit rate -q(w,w) seen in a kernel-form game.
  std::optional<double> max_exit_rate;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::string cell_name(const std::vector<std::string>& states, std::size_t w,
                             const std::vector<std::string>& a1, std::size_t i,
                             const std::vector<std::string>& a2, std::size_t j) {
  return "state " + states[w] + ", profile (" + a1[i] + "," + a2[j] + ")";
}

template <class T>
std::string str(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline ValidationReport validate(const PartitionSignalGame& g) {
  ValidationReport r;
  const std::size_t n = g.num_states();
  if (n == 0) r.violations.push_back("no states");
  if (g.partition.size() != n) {
    r.violations.push_back("partition is not total");
    return r;
  }
  if (g.actions1.size() != g.num_signals() || g.actions2.size() != g.num_signals()) {
    r.violations.push_back("action sets missing for some signals");
    return r;
  }
  for (std::size_t w = 0; w < n; ++w)
    if (g.partition[w] >= g.num_signals()) {
      r.violations.push_back("state " + g.states[w] + " maps to a missing signal");
      return r;
    }
  for (std::size_t s = 0; s < g.num_signals(); ++s) {
    if (g.actions1[s].empty() || g.actions2[s].empty())
      r.violations.push_back("signal " + g.signals[s] + " has an empty action set");
    if (g.class_states(s).empty()) r.warnings.push_back("signal " + g.signals[s] + " is not used by any state");
  }
  if (!r.ok()) return r;
  if (g.payoff.size() != n || g.dynamics.size() != n) {
    r.violations.push_back("payoff or dynamics table has the wrong number of states");
    return r;
  }
  double max_exit = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t m = g.rows(w), k = g.cols(w);
    if (g.payoff[w].size() != m * k || g.dynamics[w].size() != m * k * n) {
      r.violations.push_back("state " + g.states[w] + " has missing action profiles");
      continue;
    }
    const auto& a1 = g.actions1[g.partition[w]];
    const auto& a2 = g.actions2[g.partition[w]];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::string where = detail::cell_name(g.states, w, a1, i, a2, j);
        if (!std::isfinite(g.g(w, i, j))) r.violations.push_back(where + ": payoff is not finite");
        auto row = g.row(w, i, j);
        double sum = 0.0;
        bool finite = true;
        for (std::size_t v = 0; v < n; ++v) {
          if (!std::isfinite(row[v])) finite = false;
          sum += row[v];
        }
        if (!finite) {
          r.violations.push_back(where + ": non-finite dynamics entry");
          continue;
        }
        if (g.kind == DynamicsKind::kTransition) {
          for (std::size_t v = 0; v < n; ++v)
            if (row[v] < 0.0) r.violations.push_back(where + ": negative probability to " + g.states[v]);
          if (std::abs(sum - 1.0) > kStochasticTol)
            r.violations.push_back(where + ": row sums to " + detail::str(sum));
        } else {
          for (std::size_t v = 0; v < n; ++v)
            if (v != w && row[v] < 0.0) r.violations.push_back(where + ": negative rate to " + g.states[v]);
          if (std::abs(sum) > kStochasticTol)
            r.violations.push_back(where + ": kernel row sums to " + detail::str(sum));
          max_exit = std::max(max_exit, -row[w]);
        }
      }
  }
  if (g.kind == DynamicsKind::kKernel) r.max_exit_rate = max_exit;
  return r;
}

inline ValidationReport validate(const GeneralSignalGame& g) {
  ValidationReport r;
  const std::size_t n = g.num_states();
  if (n == 0) r.violations.push_back("no states");
  if (g.actions1.empty() || g.actions2.empty()) r.violations.push_back("empty action set");
  if (g.signals.empty()) r.violations.push_back("no signals");
  const std::size_t cells = g.actions1.size() * g.actions2.size();
  if (g.payoff.size() != n || g.transitions.size() != n) {
    r.violations.push_back("payoff or transition table has the wrong number of states");
    return r;
  }
  if (!r.ok()) return r;
  for (std::size_t w = 0; w < n; ++w) {
    if (g.payoff[w].size() != cells || g.transitions[w].size() != cells) {
      r.violations.push_back("state " + g.states[w] + " has missing action profiles");
      continue;
    }
    for (std::size_t i = 0; i < g.actions1.size(); ++i)
      for (std::size_t j = 0; j < g.actions2.size(); ++j) {
        const std::string where = detail::cell_name(g.states, w, g.actions1, i, g.actions2, j);
        if (!std::isfinite(g.g(w, i, j))) r.violations.push_back(where + ": payoff is not finite");
        const auto& outs = g.outcomes(w, i, j);
        double sum = 0.0;
        for (std::size_t a = 0; a < outs.size(); ++a) {
          const Outcome& o = outs[a];
          if (o.state >= n || o.signal >= g.num_signals()) {
            r.violations.push_back(where + ": outcome index out of range");
            continue;
          }
          if (!std::isfinite(o.prob) || o.prob < 0.0)
            r.violations.push_back(where + ": invalid probability " + detail::str(o.prob));
          for (std::size_t b = 0; b < a; ++b)
            if (outs[b].state == o.state && outs[b].signal == o.signal)
              r.violations.push_back(where + ": duplicate outcome (" + g.states[o.state] + "," +
                                     g.signals[o.signal] + ")");
          sum += o.prob;
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
          r.violations.push_back(where + ": outcome probabilities sum to " + detail::str(sum));
      }
  }
  return r;
}

inline ValidationReport validate(const SplitDynamics& sd) {
  ValidationReport r;
  const std::size_t n = sd.num_states(), a = sd.num_signals();
  const std::size_t cells = sd.actions1.size() * sd.actions2.size();
  if (sd.marginal.size() != n || sd.signalling.size() != n || sd.payoff.size() != n) {
    r.violations.push_back("tables have the wrong number of states");
    return r;
  }
  auto check = [&](std::span<const double> dist, const std::string& where) {
    double sum = 0.0;
    for (double p : dist) {
      if (!std::isfinite(p) || p < 0.0) r.violations.push_back(where + ": invalid probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) r.violations.push_back(where + ": sums to " + detail::str(sum));
  };
  for (std::size_t w = 0; w < n; ++w) {
    if (sd.marginal[w].size() != cells || sd.signalling[w].size() != cells) {
      r.violations.push_back("state " + sd.states[w] + " has missing action profiles");
      continue;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      const std::string where = "state " + sd.states[w] + ", profile #" + std::to_string(c);
      if (sd.marginal[w][c].size() != n || sd.signalling[w][c].size() != n * a) {
        r.violations.push_back(where + ": wrong table size");
        continue;
      }
      check(sd.marginal[w][c], where + " marginal");
      for (std::size_t v = 0; v < n; ++v)
        check(std::span<const double>(sd.signalling[w][c]).subspan(v * a, a),
              where + " signalling to " + sd.states[v]);
    }
  }
  return r;
}

// Throws InvalidGame carrying the first violations when the report is not ok.
template <class Game>
void require_valid(const Game& g) {
  ValidationReport r = validate(g);
  if (r.ok()) return;
  std::string msg = std::to_string(r.violations.size()) + " violation(s): " + r.violations.front();
  fail(ErrorCode::kInvalidGame, msg);
}

// P = I + h q. Payoffs are left untouched.
inline PartitionSignalGame kernel_to_transition(const PartitionSignalGame& q, double h) {
  if (q.kind != DynamicsKind::kKernel) fail(ErrorCode::kInvalidArgument, "kernel_to_transition expects a kernel");
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::kInvalidArgument, "stage duration must be positive");
  PartitionSignalGame p = q;
  p.kind = DynamicsKind::kTransition;
  const std::size_t n = q.num_states();
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t i = 0; i < q.rows(w); ++i)
      for (std::size_t j = 0; j < q.cols(w); ++j) {
        auto out = p.row(w, i, j);
        auto in = q.row(w, i, j);
        for (std::size_t v = 0; v < n; ++v) out[v] = h * in[v];
        double diag = 1.0 + h * in[w];
        if (diag < 0.0) {
          if (diag < -kStochasticTol)
            fail(ErrorCode::kStepTooLarge, "h=" + detail::str(h) + " makes the stay probability of state " +
                                               q.states[w] + " negative");
          diag = 0.0;
        }
        out[w] = diag;
      }
  return p;
}

// q = P - I.
inline PartitionSignalGame transition_to_kernel(const PartitionSignalGame& p) {
  if (p.kind != DynamicsKind::kTransition)
    fail(ErrorCode::kInvalidArgument, "transition_to_kernel expects a transition game");
  PartitionSignalGame q = p;
  q.kind = DynamicsKind::kKernel;
  for (std::size_t w = 0; w < p.num_states(); ++w)
    for (std::size_t i = 0; i < p.rows(w); ++i)
      for (std::size_t j = 0; j < p.cols(w); ++j) q.row(w, i, j)[w] -= 1.0;
  return q;
}

// Global action sets are as large as the largest per-signal set; smaller sets
// are padded with copies of their lexicographically first action.
inline GeneralSignalGame partition_to_general(const PartitionSignalGame& g) {
  if (g.kind != DynamicsKind::kTransition)
    fail(ErrorCode::kInvalidArgument, "partition_to_general expects a transition game");
  const std::size_t n = g.num_states();
  auto global_names = [&](const std::vector<std::vector<std::string>>& sets, char prefix) {
    bool same = std::all_of(sets.begin(), sets.end(), [&](const auto& s) { return s == sets.front(); });
    if (same) return sets.front();
    std::size_t size = 0;
    for (const auto& s : sets) size = std::max(size, s.size());
    std::vector<std::string> names;
    for (std::size_t k = 0; k < size; ++k) names.push_back(std::string(1, prefix) + std::to_string(k));
    return names;
  };
  auto padding = [](const std::vector<std::string>& local, std::size_t size) {
    std::vector<std::size_t> map(size);
    const std::size_t first =
        static_cast<std::size_t>(std::min_element(local.begin(), local.end()) - local.begin());
    for (std::size_t k = 0; k < size; ++k) map[k] = k < local.size() ? k : first;
    return map;
  };
  GeneralSignalGame out =
      GeneralSignalGame::create(g.states, g.signals, global_names(g.actions1, 'i'), global_names(g.actions2, 'j'));
  const std::size_t m = out.actions1.size(), k = out.actions2.size();
  out.source1.resize(n);
  out.source2.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    out.source1[w] = padding(g.actions1[g.partition[w]], m);
    out.source2[w] = padding(g.actions2[g.partition[w]], k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t li = out.source1[w][i], lj = out.source2[w][j];
        out.g(w, i, j) = g.g(w, li, lj);
        auto row = g.row(w, li, lj);
        auto& outs = out.outcomes(w, i, j);
        for (std::size_t v = 0; v < n; ++v)
          if (row[v] > 0.0) outs.push_back({v, g.partition[v], row[v]});
      }
  }
  return out;
}

// zero_mass_signalling is used for state pairs the marginal never reaches;
// it defaults to the uniform law over signals.
inline SplitDynamics split_general(const GeneralSignalGame& gg,
                                   std::optional<std::vector<double>> zero_mass_signalling = std::nullopt) {
  const std::size_t n = gg.num_states(), a = gg.num_signals();
  std::vector<double> fallback = zero_mass_signalling.value_or(std::vector<double>(a, 1.0 / static_cast<double>(a)));
  if (fallback.size() != a) fail(ErrorCode::kDimensionMismatch, "signalling default has the wrong length");
  SplitDynamics sd{gg.states, gg.signals, gg.actions1, gg.actions2, gg.payoff, {}, {}};
  const std::size_t cells = gg.actions1.size() * gg.actions2.size();
  sd.marginal.assign(n, std::vector<std::vector<double>>(cells, std::vector<double>(n, 0.0)));
  sd.signalling.assign(n, std::vector<std::vector<double>>(cells, std::vector<double>(n * a, 0.0)));
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t c = 0; c < cells; ++c) {
      auto& marg = sd.marginal[w][c];
      auto& sig = sd.signalling[w][c];
      for (const Outcome& o : gg.transitions[w][c]) marg[o.state] += o.prob;
      for (const Outcome& o : gg.transitions[w][c])
        if (marg[o.state] > 0.0) sig[o.state * a + o.signal] += o.prob / marg[o.state];
      for (std::size_t v = 0; v < n; ++v)
        if (!(marg[v] > 0.0)) std::copy(fallback.begin(), fallback.end(), sig.begin() + static_cast<std::ptrdiff_t>(v * a));
    }
  return sd;
}

// Outcomes are emitted in (state, signal) order; zero-mass pairs are dropped.
inline GeneralSignalGame merge_split(const SplitDynamics& sd) {
  const std::size_t n = sd.num_states(), a = sd.num_signals();
  GeneralSignalGame gg = GeneralSignalGame::create(sd.states, sd.signals, sd.actions1, sd.actions2);
  gg.payoff = sd.payoff;
  const std::size_t cells = sd.actions1.size() * sd.actions2.size();
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t s = 0; s < a; ++s) {
          const double p = sd.marginal[w][c][v] * sd.signalling[w][c][v * a + s];
          if (p > 0.0) gg.transitions[w][c].push_back({v, s, p});
        }
  return gg;
}

// Sorts every outcome list by (state, signal).
inline void canonicalize(GeneralSignalGame& gg) {
  for (auto& per_state : gg.transitions)
    for (auto& outs : per_state)
      std::sort(outs.begin(), outs.end(), [](const Outcome& x, const Outcome& y) {
        return x.state != y.state ? x.state < y.state : x.signal < y.signal;
      });
}

}  // namespace sdg
