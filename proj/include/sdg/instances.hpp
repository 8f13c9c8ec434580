#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "sdg/error.hpp"
#include "sdg/game_model.hpp"
#include "sdg/side.hpp"

namespace sdg {

namespace detail {

struct Mass {
  std::size_t state;
  double prob;
};

inline void set_row(PartitionSignalGame& g, std::size_t w, std::size_t i, std::size_t j,
                    std::initializer_list<Mass> masses) {
  auto row = g.row(w, i, j);
  std::fill(row.begin(), row.end(), 0.0);
  for (const Mass& m : masses) row[m.state] += m.prob;
}

inline void set_outcomes(GeneralSignalGame& g, std::size_t w, std::size_t i, std::size_t j,
                         std::vector<Outcome> outs) {
  std::vector<Outcome> kept;
  for (const Outcome& o : outs)
    if (o.prob > 0.0) kept.push_back(o);
  g.outcomes(w, i, j) = std::move(kept);
}

// Fills every profile of state w with the same outcomes and payoff.
inline void set_state(GeneralSignalGame& g, std::size_t w, double payoff, const std::vector<Outcome>& outs) {
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      g.g(w, i, j) = payoff;
      set_outcomes(g, w, i, j, outs);
    }
}

// State w is controlled by one player: the other player's action is ignored.
inline void set_controlled(GeneralSignalGame& g, std::size_t w, double payoff, bool player1_controls,
                           std::size_t action, const std::vector<Outcome>& outs) {
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      g.g(w, i, j) = payoff;
      if ((player1_controls ? i : j) == action) set_outcomes(g, w, i, j, outs);
    }
}

}  // namespace detail

// Indices of the six states in the canonical order (+, ++, +*, -, --, -*).
namespace g1_state {
inline constexpr std::size_t kPlus = 0, kPlusPlus = 1, kPlusStar = 2, kMinus = 3, kMinusMinus = 4, kMinusStar = 5;
}

// Two-sided example with signal PLUS/MINUS, stored as a kernel q = P - I of the
// unit-duration transition tables.
inline PartitionSignalGame build_g1() {
  using namespace g1_state;
  using detail::set_row;
  constexpr std::size_t kPlusSignal = 0, kMinusSignal = 1;
  PartitionSignalGame g = PartitionSignalGame::create(
      {"+", "++", "+*", "-", "--", "-*"}, {"PLUS", "MINUS"},
      {kPlusSignal, kPlusSignal, kPlusSignal, kMinusSignal, kMinusSignal, kMinusSignal},
      {{"T", "M", "B"}, {"T", "B", "Q"}}, {{"L", "M", "R", "Q"}, {"L", "R"}}, DynamicsKind::kTransition);
  for (std::size_t w = 0; w < 6; ++w)
    for (double& x : g.payoff[w]) x = w < 3 ? 1.0 : -1.0;

  const double half = 1.0 / 2.0, third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
  // MINUS: rows T, B, Q; columns L, R. Matched pairs (T,L), (B,R).
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      if (i == j) {
        set_row(g, kMinusMinus, i, j, {{kMinusMinus, half}, {kMinus, half}});
        set_row(g, kMinus, i, j, {{kMinus, 1.0}});
      } else {
        set_row(g, kMinusMinus, i, j, {{kMinusMinus, 1.0}});
        set_row(g, kMinus, i, j, {{kMinusMinus, 1.0}});
      }
    }
  for (std::size_t j = 0; j < 2; ++j) {
    set_row(g, kMinusMinus, 2, j, {{kMinusStar, 1.0}});
    set_row(g, kMinus, 2, j, {{kPlusPlus, 1.0}});
  }
  // PLUS: rows T, M, B; columns L, M, R, Q. Matched pairs on the diagonal.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) {
        set_row(g, kPlusPlus, i, j, {{kPlusPlus, third}, {kPlus, two_thirds}});
        set_row(g, kPlus, i, j, {{kPlus, 1.0}});
      } else {
        set_row(g, kPlusPlus, i, j, {{kPlusPlus, 1.0}});
        set_row(g, kPlus, i, j, {{kPlusPlus, 1.0}});
      }
    }
    set_row(g, kPlusPlus, i, 3, {{kPlusStar, 1.0}});
    set_row(g, kPlus, i, 3, {{kMinusMinus, 1.0}});
  }
  return transition_to_kernel(g);
}

// Signals alpha/beta with global actions {C, Q}. In minus states player 1
// controls the move and player 2's action is a copy; plus states mirror this.
// Absorbing states repeat the signal they are entered with.
inline GeneralSignalGame build_g1_tilde() {
  using namespace g1_state;
  using detail::set_controlled;
  constexpr std::size_t kAlpha = 0, kBeta = 1, kC = 0, kQ = 1;
  GeneralSignalGame g =
      GeneralSignalGame::create({"+", "++", "+*", "-", "--", "-*"}, {"alpha", "beta"}, {"C", "Q"}, {"C", "Q"});
  const double half = 1.0 / 2.0, quarter = 1.0 / 4.0, third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
  const double two_ninths = 2.0 / 9.0, ninth = 1.0 / 9.0;
  set_controlled(g, kMinus, -1.0, true, kC, {{kMinus, kAlpha, half}, {kMinusMinus, kBeta, half}});
  set_controlled(g, kMinus, -1.0, true, kQ, {{kPlusPlus, kAlpha, 1.0}});
  set_controlled(g, kMinusMinus, -1.0, true, kC,
                 {{kMinus, kAlpha, quarter}, {kMinusMinus, kAlpha, quarter}, {kMinusMinus, kBeta, half}});
  set_controlled(g, kMinusMinus, -1.0, true, kQ, {{kMinusStar, kBeta, 1.0}});
  set_controlled(g, kPlus, 1.0, false, kC, {{kPlus, kAlpha, third}, {kPlusPlus, kBeta, two_thirds}});
  set_controlled(g, kPlus, 1.0, false, kQ, {{kMinusMinus, kAlpha, 1.0}});
  set_controlled(g, kPlusPlus, 1.0, false, kC,
                 {{kPlus, kAlpha, two_ninths}, {kPlusPlus, kAlpha, ninth}, {kPlusPlus, kBeta, two_thirds}});
  set_controlled(g, kPlusPlus, 1.0, false, kQ, {{kPlusStar, kBeta, 1.0}});
  detail::set_state(g, kPlusStar, 1.0, {{kPlusStar, kBeta, 1.0}});
  detail::set_state(g, kMinusStar, -1.0, {{kMinusStar, kBeta, 1.0}});
  canonicalize(g);
  return g;
}

// Indices of the four half-game states: transient t0, t1 (- and -- or + and
// ++), the same-side absorbing state, and the exit state.
namespace half_state {
inline constexpr std::size_t kOne = 0, kTwo = 1, kStar = 2, kExit = 3;
}

// One side of the example with the cross-side jump replaced by an absorbing
// exit state of payoff k. State-blind (one signal), kernel form.
inline PartitionSignalGame build_half(Side side, double k) {
  using namespace half_state;
  using detail::set_row;
  if (!(k >= -1.0 && k <= 1.0)) fail(ErrorCode::kDomainError, "exit payoff must lie in [-1,1]");
  const bool minus = side == Side::kMinus;
  std::vector<std::string> states =
      minus ? std::vector<std::string>{"-", "--", "-*", "k*"} : std::vector<std::string>{"+", "++", "+*", "k*"};
  std::vector<std::string> a1 = minus ? std::vector<std::string>{"T", "B", "Q"} : std::vector<std::string>{"T", "M", "B"};
  std::vector<std::string> a2 =
      minus ? std::vector<std::string>{"L", "R"} : std::vector<std::string>{"L", "M", "R", "Q"};
  PartitionSignalGame g =
      PartitionSignalGame::create(std::move(states), {"ONE"}, {0, 0, 0, 0}, {a1}, {a2}, DynamicsKind::kTransition);
  const double sign = minus ? -1.0 : 1.0;
  for (std::size_t w = 0; w < 3; ++w)
    for (double& x : g.payoff[w]) x = sign;
  for (double& x : g.payoff[kExit]) x = k;
  if (minus) {
    const double half = 1.0 / 2.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        if (i == j) {
          set_row(g, kTwo, i, j, {{kTwo, half}, {kOne, half}});
          set_row(g, kOne, i, j, {{kOne, 1.0}});
        } else {
          set_row(g, kTwo, i, j, {{kTwo, 1.0}});
          set_row(g, kOne, i, j, {{kTwo, 1.0}});
        }
      }
    for (std::size_t j = 0; j < 2; ++j) {
      set_row(g, kTwo, 2, j, {{kStar, 1.0}});
      set_row(g, kOne, 2, j, {{kExit, 1.0}});
    }
  } else {
    const double third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) {
          set_row(g, kTwo, i, j, {{kTwo, third}, {kOne, two_thirds}});
          set_row(g, kOne, i, j, {{kOne, 1.0}});
        } else {
          set_row(g, kTwo, i, j, {{kTwo, 1.0}});
          set_row(g, kOne, i, j, {{kTwo, 1.0}});
        }
      }
      set_row(g, kTwo, i, 3, {{kStar, 1.0}});
      set_row(g, kOne, i, 3, {{kExit, 1.0}});
    }
  }
  return transition_to_kernel(g);
}

// Signal-augmented half game with stage duration h built in: payoffs +-h on
// the side's states, 0 on the exit state 0*. The controlling player chooses
// C or Q; the other player's action is a copy.
inline GeneralSignalGame build_tilde_half(Side side, double h) {
  using namespace half_state;
  using detail::set_controlled;
  if (!(h > 0.0 && h <= 1.0)) fail(ErrorCode::kDomainError, "stage duration must lie in (0,1]");
  constexpr std::size_t kAlpha = 0, kBeta = 1, kDelta = 2, kC = 0, kQ = 1;
  const bool minus = side == Side::kMinus;
  std::vector<std::string> states =
      minus ? std::vector<std::string>{"-", "--", "-*", "0*"} : std::vector<std::string>{"+", "++", "+*", "0*"};
  GeneralSignalGame g = GeneralSignalGame::create(std::move(states), {"alpha", "beta", "delta"}, {"C", "Q"}, {"C", "Q"});
  const double payoff = minus ? -h : h;
  const bool p1 = minus;
  if (minus) {
    set_controlled(g, kOne, payoff, p1, kC,
                   {{kOne, kAlpha, 1.0 / 2.0}, {kOne, kBeta, (1.0 - h) / 2.0}, {kTwo, kBeta, h / 2.0}});
    set_controlled(g, kTwo, payoff, p1, kC,
                   {{kOne, kAlpha, h / 4.0}, {kTwo, kAlpha, (2.0 - h) / 4.0}, {kTwo, kBeta, 1.0 / 2.0}});
  } else {
    set_controlled(g, kOne, payoff, p1, kC,
                   {{kOne, kAlpha, 1.0 / 3.0}, {kTwo, kBeta, 2.0 * h / 3.0}, {kOne, kBeta, 2.0 * (1.0 - h) / 3.0}});
    set_controlled(g, kTwo, payoff, p1, kC,
                   {{kOne, kAlpha, 2.0 * h / 9.0}, {kTwo, kAlpha, (3.0 - 2.0 * h) / 9.0}, {kTwo, kBeta, 2.0 / 3.0}});
  }
  set_controlled(g, kOne, payoff, p1, kQ, {{kExit, kAlpha, h}, {kOne, kDelta, 1.0 - h}});
  set_controlled(g, kTwo, payoff, p1, kQ, {{kStar, kBeta, h}, {kTwo, kDelta, 1.0 - h}});
  detail::set_state(g, kStar, payoff, {{kStar, kBeta, 1.0}});
  detail::set_state(g, kExit, 0.0, {{kExit, kAlpha, 1.0}});
  canonicalize(g);
  return g;
}

// Perfect-observation fixture: w0 pays the identity matrix and moves to the
// absorbing zero-payoff w1 at rate 1 under (a, a) only.
inline PartitionSignalGame build_perfect_test() {
  PartitionSignalGame g = PartitionSignalGame::create({"w0", "w1"}, {"s0", "s1"}, {0, 1}, {{"a", "b"}, {"a"}},
                                                      {{"a", "b"}, {"a"}}, DynamicsKind::kKernel);
  g.g(0, 0, 0) = 1.0;
  g.g(0, 1, 1) = 1.0;
  g.row(0, 0, 0)[0] = -1.0;
  g.row(0, 0, 0)[1] = 1.0;
  return g;
}

}  // namespace sdg
