#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sdg/belief.hpp"
#include "sdg/error.hpp"
#include "sdg/instances.hpp"
#include "sdg/matrix_game.hpp"
#include "sdg/side.hpp"

namespace sdg {

// Belief level above which the controlling player stops quitting.
inline double threshold(Side side, double lambda) {
  if (!(lambda >= 0.0)) fail(ErrorCode::kDomainError, "lambda must be nonnegative");
  return side == Side::kMinus ? (4.0 * lambda + 2.0) / (4.0 * lambda + 3.0) : (9.0 * lambda + 6.0) / (9.0 * lambda + 8.0);
}

namespace detail {

inline void check_w_args(double lambda, double p) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kDomainError, "lambda must be positive");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kDomainError, "p must lie in [0,1]");
}

// Coefficients of the upper branch: minus is -1 + c (3p-2)^(-e), plus is
// 1 - c (8p-6)^(-e).
struct UpperBranch {
  double c, e, slope, offset;
};

inline UpperBranch upper_branch(Side side, double lambda) {
  if (side == Side::kMinus) {
    const double e = 4.0 * lambda / 3.0;
    const double c = std::pow(4.0 * lambda, e) / ((1.0 + lambda) * std::pow(3.0 + 4.0 * lambda, 1.0 + e));
    return {c, e, 3.0, 2.0};
  }
  const double e = 9.0 * lambda / 8.0;
  const double c = 2.0 * std::pow(18.0 * lambda, e) / ((1.0 + lambda) * std::pow(8.0 + 9.0 * lambda, 1.0 + e));
  return {c, e, 8.0, 6.0};
}

}  // namespace detail

// Value of the half game with exit payoff 0 in the vanishing-duration limit,
// as a function of the mass p on the second transient state.
inline double w(Side side, double lambda, double p) {
  detail::check_w_args(lambda, p);
  const double sign = side == Side::kMinus ? -1.0 : 1.0;
  if (p < threshold(side, lambda)) return sign * (p + lambda) / (1.0 + lambda);
  const auto u = detail::upper_branch(side, lambda);
  return sign * (1.0 - u.c * std::pow(u.slope * p - u.offset, -u.e));
}

struct OneSidedDerivative {
  double left;
  double right;
};

// Derivative of w in p. Off the threshold both sides coincide.
inline OneSidedDerivative w_derivative(Side side, double lambda, double p) {
  detail::check_w_args(lambda, p);
  const double sign = side == Side::kMinus ? -1.0 : 1.0;
  const double lower = sign / (1.0 + lambda);
  const auto u = detail::upper_branch(side, lambda);
  auto upper = [&] { return sign * u.c * u.e * u.slope * std::pow(u.slope * p - u.offset, -u.e - 1.0); };
  const double t = threshold(side, lambda);
  if (p < t) return {lower, lower};
  if (p > t) return {upper(), upper()};
  return {lower, upper()};
}

// Pointwise lambda -> 0 limit of w.
inline double w_limit(Side side, double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kDomainError, "p must lie in [0,1]");
  return side == Side::kMinus ? -std::min(p, 2.0 / 3.0) : std::min(p, 3.0 / 4.0);
}

// Value with exit payoff k from the value v0 with exit payoff 0.
inline double affine_extend(Side side, double v0, double k) {
  if (!(k >= -1.0 && k <= 1.0)) fail(ErrorCode::kDomainError, "exit payoff must lie in [-1,1]");
  return side == Side::kMinus ? (k + 1.0) * v0 + k : (1.0 - k) * v0 + k;
}

struct CombinedValues {
  double v_plus;
  double v_minus;
};

// Solves v_plus = affine_extend(plus, vp0, v_minus), v_minus =
// affine_extend(minus, vm0, v_plus) for the pair.
inline CombinedValues combine_half_values(double vm0, double vp0) {
  const double den = vm0 - vp0 - vm0 * vp0;
  if (std::abs(den) < 1e-15) fail(ErrorCode::kSingularSystem, "coupling system is singular");
  return {-(vm0 + vp0 - vm0 * vp0) / den, -(vm0 + vp0 + vm0 * vp0) / den};
}

// Limit value of the two-sided example at a six-state belief in the order
// (+, ++, +*, -, --, -*).
inline double limit_value(const Belief& p) {
  if (p.size() != 6) fail(ErrorCode::kDimensionMismatch, "limit_value expects six states");
  const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4], p6 = p[5];
  double v = p3 - p6;
  const double plus_mass = p1 + p2;
  if (plus_mass == 0.0 || p2 / plus_mass >= 3.0 / 4.0) v += 7.0 / 11.0 * plus_mass;
  else v += -5.0 / 11.0 * p1 + p2;
  const double minus_mass = p4 + p5;
  if (minus_mass == 0.0 || p5 / minus_mass >= 2.0 / 3.0) v += -5.0 / 11.0 * minus_mass;
  else v += 7.0 / 11.0 * p4 - p5;
  return v;
}

// A candidate solution of the half-game limit equation, evaluated at p3 = 0
// with mass p1, p2 on the two transient states. gradient returns the partial
// derivatives in p1 and p2, or nullopt when it is unavailable.
struct ValueWithGradient {
  std::function<double(double, double)> value;
  std::function<std::optional<std::array<double, 2>>(double, double)> gradient;
};

// (p1 + p2) w(p2 / (p1 + p2)) with the analytic gradient.
inline ValueWithGradient wbar(Side side, double lambda) {
  ValueWithGradient f;
  f.value = [side, lambda](double p1, double p2) {
    const double s = p1 + p2;
    return s > 0.0 ? s * w(side, lambda, std::clamp(p2 / s, 0.0, 1.0)) : 0.0;
  };
  f.gradient = [side, lambda](double p1, double p2) -> std::optional<std::array<double, 2>> {
    const double s = p1 + p2;
    if (!(s > 0.0)) return std::nullopt;
    const double r = std::clamp(p2 / s, 0.0, 1.0);
    const double wr = w(side, lambda, r);
    const double d = w_derivative(side, lambda, r).right;
    return std::array<double, 2>{wr - r * d, wr + (1.0 - r) * d};
  };
  return f;
}

// Replaces the gradient by central differences of the value.
inline ValueWithGradient with_finite_differences(ValueWithGradient f, double step = 1e-6) {
  auto value = f.value;
  f.gradient = [value, step](double p1, double p2) -> std::optional<std::array<double, 2>> {
    return std::array<double, 2>{(value(p1 + step, p2) - value(p1 - step, p2)) / (2.0 * step),
                                 (value(p1, p2 + step) - value(p1, p2 - step)) / (2.0 * step)};
  };
  return f;
}

// Residual lambda v - Val[lambda g(p) + <p * q(i,j), grad v>] of the limit
// equation on the half game at mass (p1, p2, 0, 1 - p1 - p2). The same-side
// absorbing state has value -1 (minus) or +1 (plus) and the exit state 0, which
// fixes the last two gradient components. The game's own kernel supplies the
// drift, so the optimal action is found by the matrix-game solver.
inline double pde_residual(Side side, double lambda, double p1, double p2, const ValueWithGradient& vfun) {
  if (!(p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0 + 1e-15)) fail(ErrorCode::kDomainError, "(p1,p2) outside the simplex");
  if (!vfun.gradient) fail(ErrorCode::kGradientUnavailable, "no gradient supplied");
  const auto grad = vfun.gradient(p1, p2);
  if (!grad) fail(ErrorCode::kGradientUnavailable, "gradient unavailable at this point");
  const double sign = side == Side::kMinus ? -1.0 : 1.0;
  const std::array<double, 4> dv{(*grad)[0], (*grad)[1], sign, 0.0};
  const std::array<double, 4> mass{p1, p2, 0.0, std::max(0.0, 1.0 - p1 - p2)};
  static const PartitionSignalGame minus_kernel = build_half(Side::kMinus, 0.0);
  static const PartitionSignalGame plus_kernel = build_half(Side::kPlus, 0.0);
  const PartitionSignalGame& q = side == Side::kMinus ? minus_kernel : plus_kernel;
  MatrixGame m(q.rows(0), q.cols(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const std::vector<double> d = drift(mass, q, i, j);
      double payoff = 0.0, transport = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        payoff += mass[k] * q.g(k, i, j);
        transport += d[k] * dv[k];
      }
      m(i, j) = lambda * payoff + transport;
    }
  return lambda * vfun.value(p1, p2) - solve_matrix_game(m, 1e-12).value;
}

}  // namespace sdg
