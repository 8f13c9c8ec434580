#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <vector>

#include "sdg/error.hpp"

namespace sdg {

inline constexpr double kDefaultMatrixTol = 1e-10;

// Row player maximizes. Dense row-major storage.
class MatrixGame {
 public:
  MatrixGame() = default;
  MatrixGame(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  MatrixGame(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) fail(ErrorCode::kDimensionMismatch, "ragged matrix");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }

  void resize(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    a_.assign(rows * cols, 0.0);
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

struct MatrixSolution {
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  double gap = 0.0;
};

namespace detail {

// Scratch space for the tableau so hot loops do not allocate.
struct SimplexWorkspace {
  std::vector<double> tableau;
  std::vector<std::size_t> basis;
};

inline double gap_raw(const double* a, std::size_t m, std::size_t n, const double* x, const double* y,
                      double* lo_out = nullptr, double* hi_out = nullptr) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * y[j];
    hi = std::max(hi, s);
  }
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[i * n + j] * x[i];
    lo = std::min(lo, s);
  }
  if (lo_out) *lo_out = lo;
  if (hi_out) *hi_out = hi;
  return hi - lo;
}

inline void normalize_strategy(double* p, std::size_t k) {
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    if (p[t] < 0.0) p[t] = 0.0;
    sum += p[t];
  }
  for (std::size_t t = 0; t < k; ++t) p[t] /= sum;
}

// max sum(y') s.t. A' y' <= 1, y' >= 0 with A' = A + shift > 0. Bland's rule,
// so the returned vertex is a deterministic function of the input.
inline void simplex_solve(const double* a, std::size_t m, std::size_t n, double* x, double* y,
                          SimplexWorkspace& ws) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < m * n; ++t) lo = std::min(lo, a[t]);
  const double shift = 1.0 - lo;
  const std::size_t width = n + m + 1;  // structural, slack, rhs
  ws.tableau.assign((m + 1) * width, 0.0);
  ws.basis.resize(m);
  double* T = ws.tableau.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i * width + j] = a[i * n + j] + shift;
    T[i * width + n + i] = 1.0;
    T[i * width + width - 1] = 1.0;
    ws.basis[i] = n + i;
  }
  double* obj = T + m * width;
  for (std::size_t j = 0; j < n; ++j) obj[j] = -1.0;
  constexpr double eps = 1e-13;
  const std::size_t max_pivots = 50 * (m + n) + 1000;
  for (std::size_t pivots = 0;; ++pivots) {
    if (pivots > max_pivots) fail(ErrorCode::kNoConvergence, "simplex pivot limit reached");
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (obj[j] < -eps) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double coef = T[i * width + enter];
      if (coef > eps) {
        const double ratio = T[i * width + width - 1] / coef;
        const bool tie = leave < m && ratio <= best + eps && ws.basis[i] < ws.basis[leave];
        if (leave == m || ratio < best - eps || tie) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
    }
    if (leave == m) fail(ErrorCode::kNoConvergence, "unbounded matrix-game program");
    double* prow = T + leave * width;
    const double piv = prow[enter];
    for (std::size_t j = 0; j < width; ++j) prow[j] /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double* r = T + i * width;
      const double f = r[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) r[j] -= f * prow[j];
    }
    ws.basis[leave] = enter;
  }
  std::fill(y, y + n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (ws.basis[i] < n) y[ws.basis[i]] = T[i * width + width - 1];
  for (std::size_t i = 0; i < m; ++i) x[i] = obj[n + i];
  normalize_strategy(x, m);
  normalize_strategy(y, n);
}

// Core solver on raw storage; returns the value and writes x, y, gap. A pure
// saddle is accepted when its gap is at most saddle_tol; mixed solutions must
// certify a gap of at most tol.
inline double solve_raw(const double* a, std::size_t m, std::size_t n, double tol, double* x, double* y,
                        double& gap, SimplexWorkspace& ws, double saddle_tol) {
  for (std::size_t t = 0; t < m * n; ++t)
    if (!std::isfinite(a[t])) fail(ErrorCode::kNonFinite, "matrix game entry is not finite");
  // Pure saddle: first row attaining the maximin, first column attaining the minimax.
  std::size_t bi = 0, bj = 0;
  double maximin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double r = a[i * n];
    for (std::size_t j = 1; j < n; ++j) r = std::min(r, a[i * n + j]);
    if (r > maximin) {
      maximin = r;
      bi = i;
    }
  }
  double minimax = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double c = a[j];
    for (std::size_t i = 1; i < m; ++i) c = std::max(c, a[i * n + j]);
    if (c < minimax) {
      minimax = c;
      bj = j;
    }
  }
  if (minimax - maximin <= saddle_tol) {
    std::fill(x, x + m, 0.0);
    std::fill(y, y + n, 0.0);
    x[bi] = 1.0;
    y[bj] = 1.0;
    gap = minimax - maximin;
    return a[bi * n + bj];
  }
  double lo = 0.0, hi = 0.0;
  if (m == 2 && n == 2) {
    // No saddle, so the equilibrium is unique and completely mixed.
    const double p = a[0], q = a[1], r = a[2], s = a[3];
    const double den = p - q - r + s;
    if (den != 0.0) {
      x[0] = (s - r) / den;
      x[1] = 1.0 - x[0];
      y[0] = (s - q) / den;
      y[1] = 1.0 - y[0];
      normalize_strategy(x, 2);
      normalize_strategy(y, 2);
      gap = gap_raw(a, m, n, x, y, &lo, &hi);
      if (gap <= tol) return 0.5 * (lo + hi);
    }
  }
  simplex_solve(a, m, n, x, y, ws);
  gap = gap_raw(a, m, n, x, y, &lo, &hi);
  if (gap <= tol) return 0.5 * (lo + hi);
  if (minimax - maximin <= tol) {
    std::fill(x, x + m, 0.0);
    std::fill(y, y + n, 0.0);
    x[bi] = 1.0;
    y[bj] = 1.0;
    gap = minimax - maximin;
    return a[bi * n + bj];
  }
  fail(ErrorCode::kNoConvergence, "matrix game duality gap above tolerance");
}

}  // namespace detail

inline double best_response_gap(const MatrixGame& M, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != M.rows() || y.size() != M.cols())
    fail(ErrorCode::kDimensionMismatch, "strategy sizes do not match the matrix");
  return detail::gap_raw(M.data(), M.rows(), M.cols(), x.data(), y.data());
}

inline MatrixSolution solve_matrix_game(const MatrixGame& M, double tol = kDefaultMatrixTol) {
  if (!(tol > 0.0)) fail(ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (M.rows() == 0 || M.cols() == 0) fail(ErrorCode::kDimensionMismatch, "empty matrix game");
  MatrixSolution s;
  s.x.resize(M.rows());
  s.y.resize(M.cols());
  thread_local detail::SimplexWorkspace ws;
  s.value = detail::solve_raw(M.data(), M.rows(), M.cols(), tol, s.x.data(), s.y.data(), s.gap, ws, tol);
  return s;
}

inline double matrix_value(const MatrixGame& M, double tol = kDefaultMatrixTol) {
  return solve_matrix_game(M, tol).value;
}

}  // namespace sdg
