#pragma once

#include <string_view>

#include "sdg/error.hpp"

namespace sdg {

// Which half of the two-sided example: payoff -1 states (player 1 wants out)
// or payoff +1 states (player 2 wants out).
enum class Side { kMinus, kPlus };

constexpr std::string_view to_string(Side s) { return s == Side::kMinus ? "minus" : "plus"; }

inline Side parse_side(std::string_view s) {
  if (s == "minus") return Side::kMinus;
  if (s == "plus") return Side::kPlus;
  fail(ErrorCode::kInvalidArgument, "side must be 'minus' or 'plus'");
}

}  // namespace sdg
