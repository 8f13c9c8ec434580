#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sdg/error.hpp"
#include "sdg/game_model.hpp"

namespace sdg {

// Stage n (0-based) lasts prefix[n] for n < prefix.size(), tail afterwards.
struct StageSchedule {
  std::vector<double> prefix;
  double tail = 1.0;

  static StageSchedule uniform(double h) { return make({}, h); }

  static StageSchedule make(std::vector<double> prefix, double tail) {
    StageSchedule s{std::move(prefix), tail};
    auto ok = [](double h) { return std::isfinite(h) && h > 0.0; };
    if (!ok(tail) || !std::all_of(s.prefix.begin(), s.prefix.end(), ok))
      fail(ErrorCode::kInvalidArgument, "stage durations must be positive and finite");
    return s;
  }

  bool is_uniform() const { return prefix.empty(); }
  double at(std::size_t n) const { return n < prefix.size() ? prefix[n] : tail; }
  double min_step() const {
    double m = tail;
    for (double h : prefix) m = std::min(m, h);
    return m;
  }
  double max_step() const {
    double m = tail;
    for (double h : prefix) m = std::max(m, h);
    return m;
  }
};

// w_n = lambda h_n prod_{k<n} (1 - lambda h_k) for the first count stages.
inline std::vector<double> stage_weights(double lambda, const StageSchedule& s, std::size_t count) {
  std::vector<double> w(count);
  double survive = 1.0;
  for (std::size_t n = 0; n < count; ++n) {
    const double lh = lambda * s.at(n);
    if (!(lh > 0.0 && lh < 1.0)) fail(ErrorCode::kNonContraction, "lambda*h must lie in (0,1)");
    w[n] = lh * survive;
    survive *= 1.0 - lh;
  }
  return w;
}

// Payoff weight on the stage payoff and weight on the expected continuation.
struct StageDiscount {
  double payoff_weight = 0.0;
  double continuation = 0.0;
  // Stage payoffs are this multiple of the per-unit-time payoffs.
  double payoff_scale = 1.0;
};

template <class Game>
struct StageModel {
  Game game;
  StageDiscount discount;
};

// Largest h with I + h q entrywise nonnegative; nullopt when q has no exits.
inline std::optional<double> max_step(const PartitionSignalGame& q) {
  if (q.kind != DynamicsKind::kKernel) fail(ErrorCode::kInvalidArgument, "max_step expects a kernel");
  double rate = 0.0;
  for (std::size_t w = 0; w < q.num_states(); ++w)
    for (std::size_t i = 0; i < q.rows(w); ++i)
      for (std::size_t j = 0; j < q.cols(w); ++j) rate = std::max(rate, std::abs(q.row(w, i, j)[w]));
  if (rate == 0.0) return std::nullopt;
  return 1.0 / rate;
}

// Payoffs h g, transitions I + h q.
inline PartitionSignalGame euler_transform(const PartitionSignalGame& q, double h) {
  PartitionSignalGame g = kernel_to_transition(q, h);
  for (auto& per_state : g.payoff)
    for (double& x : per_state) x *= h;
  return g;
}

// Each outcome keeps its signal with probability h; otherwise the state stays
// put and the fresh signal is emitted. Payoffs are scaled by h.
inline GeneralSignalGame signal_augmented_transform(const GeneralSignalGame& gg, double h,
                                                    const std::string& fresh_signal = "⊥") {
  if (!(h > 0.0 && h <= 1.0)) fail(ErrorCode::kInvalidArgument, "stage duration must lie in (0,1]");
  GeneralSignalGame out = gg;
  const std::size_t fresh = out.signals.size();
  out.signals.push_back(fresh_signal);
  for (std::size_t w = 0; w < out.num_states(); ++w) {
    for (double& x : out.payoff[w]) x *= h;
    for (auto& outs : out.transitions[w]) {
      for (Outcome& o : outs) o.prob *= h;
      if (h < 1.0) outs.push_back({w, fresh, 1.0 - h});
    }
  }
  return out;
}

// exp(a) for a small dense n x n matrix by scaling and squaring.
inline std::vector<double> matrix_exp(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) fail(ErrorCode::kDimensionMismatch, "matrix_exp expects an n x n matrix");
  double norm = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += std::abs(a[r * n + c]);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  auto mul = [n](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> z(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        const double xr = x[r * n + k];
        if (xr == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) z[r * n + c] += xr * y[k * n + c];
      }
    return z;
  };
  std::vector<double> b(a.begin(), a.end());
  for (double& x : b) x *= scale;
  // ||b|| <= 1/2, so 20 terms leave a remainder far below 1e-16.
  std::vector<double> result(n * n, 0.0), term(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) result[r * n + r] = term[r * n + r] = 1.0;
  for (int k = 1; k <= 20; ++k) {
    term = mul(term, b);
    for (double& x : term) x /= k;
    for (std::size_t t = 0; t < n * n; ++t) result[t] += term[t];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

// Transitions exp(h q(i,j)); payoffs are left as the base g. Every class must
// offer the same number of actions so that q(i,j) is one matrix over all states.
inline PartitionSignalGame exp_transform_game(const PartitionSignalGame& q, double h) {
  if (q.kind != DynamicsKind::kKernel) fail(ErrorCode::kInvalidArgument, "exp_transform expects a kernel");
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::kInvalidArgument, "stage duration must be positive");
  const std::size_t n = q.num_states();
  for (std::size_t w = 1; w < n; ++w)
    if (q.rows(w) != q.rows(0) || q.cols(w) != q.cols(0))
      fail(ErrorCode::kInvalidArgument, "exp_transform needs equal action set sizes in every class");
  PartitionSignalGame p = q;
  p.kind = DynamicsKind::kTransition;
  std::vector<double> gen(n * n);
  for (std::size_t i = 0; i < q.rows(0); ++i)
    for (std::size_t j = 0; j < q.cols(0); ++j) {
      for (std::size_t w = 0; w < n; ++w) {
        auto row = q.row(w, i, j);
        for (std::size_t v = 0; v < n; ++v) gen[w * n + v] = h * row[v];
      }
      std::vector<double> e = matrix_exp(gen, n);
      for (std::size_t w = 0; w < n; ++w) {
        auto out = p.row(w, i, j);
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
          double x = e[w * n + v];
          if (x < 0.0) {
            if (x < -1e-12) fail(ErrorCode::kNonFinite, "matrix exponential produced a negative entry");
            x = 0.0;
          }
          out[v] = x;
          sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-10) fail(ErrorCode::kNonFinite, "matrix exponential row is not stochastic");
        for (std::size_t v = 0; v < n; ++v) out[v] /= sum;
      }
    }
  return p;
}

inline void check_discount(double lambda, double h) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::kInvalidArgument, "stage duration must be positive");
  if (!(lambda * h < 1.0)) fail(ErrorCode::kNonContraction, "lambda*h must be below 1");
}

// Stage game of duration h from a kernel game: weight lambda on h g and
// 1 - lambda h on the continuation.
inline StageModel<PartitionSignalGame> euler_stage(const PartitionSignalGame& q, double lambda, double h) {
  check_discount(lambda, h);
  return {euler_transform(q, h), {lambda, 1.0 - lambda * h, h}};
}

// Exact discounting over a stage of length h: weight 1 - e^{-lambda h} on g,
// e^{-lambda h} on the continuation.
inline StageModel<PartitionSignalGame> exp_transform(const PartitionSignalGame& q, double h, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
  const double cont = std::exp(-lambda * h);
  return {exp_transform_game(q, h), {-std::expm1(-lambda * h), cont, 1.0}};
}

// For games whose stage payoffs already carry the factor h (transformed or
// built that way): weight lambda, continuation 1 - lambda h.
template <class Game>
StageModel<Game> discounted_stage(const Game& g, double lambda, double h) {
  check_discount(lambda, h);
  return {g, {lambda, 1.0 - lambda * h, h}};
}

}  // namespace sdg
