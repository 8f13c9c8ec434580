#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "sdg/belief.hpp"
#include "sdg/error.hpp"

namespace sdg {

// (node, weight) pairs of an interpolation stencil.
using Stencil = std::vector<std::pair<std::uint32_t, double>>;

// Regular grid on the simplex over n vertices: points k / R with k a
// composition of R into n parts. Interpolation uses the Freudenthal
// triangulation, which reproduces nodes exactly and is monotone.
class SimplexGrid {
 public:
  SimplexGrid() = default;
  SimplexGrid(std::size_t vertices, std::size_t resolution) : n_(vertices), R_(resolution) {
    if (n_ == 0) fail(ErrorCode::kInvalidArgument, "simplex grid needs at least one vertex");
    if (n_ > 4) fail(ErrorCode::kDimensionTooHigh, "simplex grids support at most 4 vertices");
    if (n_ > 1 && R_ == 0) fail(ErrorCode::kInvalidArgument, "grid resolution must be positive");
    const std::size_t d = n_ - 1;
    std::size_t table = 1;
    for (std::size_t m = 0; m < d; ++m) {
      table *= R_ + 1;
      if (table > 100'000'000) fail(ErrorCode::kBudgetExceeded, "simplex grid index too large");
    }
    index_.assign(table, -1);
    std::vector<int> comp(n_, 0);
    enumerate(comp, 0, static_cast<int>(R_));
  }

  std::size_t vertices() const { return n_; }
  std::size_t resolution() const { return R_; }
  std::size_t size() const { return comps_.size() / n_; }
  std::span<const int> node(std::size_t k) const { return {comps_.data() + k * n_, n_}; }
  std::vector<double> point(std::size_t k) const {
    std::vector<double> x(n_);
    for (std::size_t a = 0; a < n_; ++a) x[a] = n_ == 1 ? 1.0 : static_cast<double>(comps_[k * n_ + a]) / static_cast<double>(R_);
    return x;
  }

  // Index of a composition, or -1 when it is not a grid node.
  std::int64_t find(std::span<const int> comp) const {
    if (n_ == 1) return 0;
    std::size_t key = 0, mult = 1;
    int suffix = 0;
    for (std::size_t m = n_ - 1; m >= 1; --m) {
      suffix += comp[m];
      if (suffix < 0 || suffix > static_cast<int>(R_)) return -1;
    }
    suffix = 0;
    std::vector<int> y(n_, 0);
    for (std::size_t m = n_ - 1; m >= 1; --m) {
      suffix += comp[m];
      y[m] = suffix;
    }
    for (std::size_t m = 1; m < n_; ++m) {
      key += static_cast<std::size_t>(y[m]) * mult;
      mult *= R_ + 1;
    }
    if (suffix + comp[0] != static_cast<int>(R_) || comp[0] < 0) return -1;
    return index_[key];
  }

  // x is a distribution over the n vertices.
  void interpolate(std::span<const double> x, Stencil& out) const {
    out.clear();
    if (n_ == 1) {
      out.emplace_back(0, 1.0);
      return;
    }
    const std::size_t d = n_ - 1;
    const double R = static_cast<double>(R_);
    double y[4] = {0, 0, 0, 0}, f[4] = {0, 0, 0, 0};
    int base[4] = {0, 0, 0, 0};
    double suffix = 0.0;
    for (std::size_t m = d; m >= 1; --m) {
      suffix += x[m];
      double ym = std::clamp(R * suffix, 0.0, R);
      const double r = std::round(ym);
      if (std::abs(ym - r) < 1e-9) ym = r;
      y[m] = ym;
    }
    for (std::size_t m = 1; m <= d; ++m) {
      base[m] = static_cast<int>(std::floor(y[m]));
      if (base[m] >= static_cast<int>(R_)) base[m] = static_cast<int>(R_);
      f[m] = y[m] - base[m];
    }
    // Monotone base: y is nonincreasing in m, so are the floors.
    std::size_t order[3] = {1, 2, 3};
    std::stable_sort(order, order + d, [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    int cur[4] = {0, 0, 0, 0};
    std::copy(base, base + 4, cur);
    auto push = [&](double weight) {
      if (weight <= 0.0) return;
      int comp[4];
      comp[0] = static_cast<int>(R_) - cur[1];
      for (std::size_t m = 1; m < d; ++m) comp[m] = cur[m] - cur[m + 1];
      comp[d] = cur[d];
      const std::int64_t k = find(std::span<const int>(comp, n_));
      if (k < 0) fail(ErrorCode::kDomainError, "point outside the simplex grid");
      out.emplace_back(static_cast<std::uint32_t>(k), weight);
    };
    push(1.0 - f[order[0]]);
    for (std::size_t t = 0; t < d; ++t) {
      cur[order[t]] += 1;
      const double next = t + 1 < d ? f[order[t + 1]] : 0.0;
      push(f[order[t]] - next);
    }
  }

 private:
  void enumerate(std::vector<int>& comp, std::size_t pos, int left) {
    if (pos + 1 == n_) {
      comp[pos] = left;
      const std::size_t k = size();
      comps_.insert(comps_.end(), comp.begin(), comp.end());
      std::size_t key = 0, mult = 1;
      int suffix = 0;
      std::vector<int> y(n_, 0);
      for (std::size_t m = n_ - 1; m >= 1; --m) {
        suffix += comp[m];
        y[m] = suffix;
      }
      for (std::size_t m = 1; m < n_; ++m) {
        key += static_cast<std::size_t>(y[m]) * mult;
        mult *= R_ + 1;
      }
      index_[key] = static_cast<std::int64_t>(k);
      return;
    }
    for (int c = left; c >= 0; --c) {
      comp[pos] = c;
      enumerate(comp, pos + 1, left - c);
    }
  }

  std::size_t n_ = 0, R_ = 0;
  std::vector<int> comps_;
  std::vector<std::int64_t> index_;
};

// Sorted nodes on [0,1] with linear interpolation. Uniform grids locate cells
// directly; extra nodes switch to binary search.
class LineGrid {
 public:
  LineGrid() = default;
  explicit LineGrid(std::size_t resolution, std::vector<double> extra = {}) : R_(resolution) {
    if (R_ == 0) fail(ErrorCode::kInvalidArgument, "grid resolution must be positive");
    xs_.resize(R_ + 1);
    for (std::size_t k = 0; k <= R_; ++k) xs_[k] = static_cast<double>(k) / static_cast<double>(R_);
    if (!extra.empty()) {
      for (double e : extra)
        if (!(e >= 0.0 && e <= 1.0)) fail(ErrorCode::kDomainError, "grid node outside [0,1]");
      xs_.insert(xs_.end(), extra.begin(), extra.end());
      std::sort(xs_.begin(), xs_.end());
      xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
      uniform_ = false;
    }
  }

  std::size_t size() const { return xs_.size(); }
  double at(std::size_t k) const { return xs_[k]; }
  const std::vector<double>& nodes() const { return xs_; }

  // Writes at most two (node, weight) pairs.
  void interpolate(double p, Stencil& out) const {
    out.clear();
    p = std::clamp(p, 0.0, 1.0);
    std::size_t lo;
    if (uniform_) {
      const double s = p * static_cast<double>(R_);
      lo = std::min(static_cast<std::size_t>(s), R_ - 1);
      // Exact hits on a node keep a single vertex.
      if (xs_[lo + 1] == p) lo += 1;
      if (xs_[lo] == p) {
        out.emplace_back(static_cast<std::uint32_t>(lo), 1.0);
        return;
      }
    } else {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), p);
      if (it == xs_.begin()) it = std::next(it);
      lo = static_cast<std::size_t>(std::prev(it) - xs_.begin());
      if (xs_[lo] == p || lo + 1 == xs_.size()) {
        out.emplace_back(static_cast<std::uint32_t>(lo), 1.0);
        return;
      }
    }
    const double t = (p - xs_[lo]) / (xs_[lo + 1] - xs_[lo]);
    if (t <= 0.0) out.emplace_back(static_cast<std::uint32_t>(lo), 1.0);
    else if (t >= 1.0) out.emplace_back(static_cast<std::uint32_t>(lo + 1), 1.0);
    else {
      out.emplace_back(static_cast<std::uint32_t>(lo), 1.0 - t);
      out.emplace_back(static_cast<std::uint32_t>(lo + 1), t);
    }
  }

  double evaluate(const std::vector<double>& values, double p) const {
    Stencil s;
    interpolate(p, s);
    double v = 0.0;
    for (auto [k, wgt] : s) v += wgt * values[k];
    return v;
  }

  // Largest |v(x_{k+1}) - v(x_k)| over adjacent nodes.
  double max_adjacent_jump(const std::vector<double>& values) const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) m = std::max(m, std::abs(values[k + 1] - values[k]));
    return m;
  }

 private:
  std::size_t R_ = 0;
  std::vector<double> xs_;
  bool uniform_ = true;
};

// Value over beliefs stored on one simplex grid per class of states. In a
// partition game the classes are the signal cells; a general game has one
// class holding every state.
class GridValueFn {
 public:
  GridValueFn() = default;
  GridValueFn(std::vector<std::vector<std::size_t>> classes, std::size_t num_states, std::size_t resolution)
      : classes_(std::move(classes)), state_class_(num_states, 0), state_pos_(num_states, 0) {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      grids_.emplace_back(classes_[c].size(), resolution);
      offset_.push_back(offset);
      offset += grids_.back().size();
      for (std::size_t a = 0; a < classes_[c].size(); ++a) {
        state_class_[classes_[c][a]] = c;
        state_pos_[classes_[c][a]] = a;
      }
    }
    offset_.push_back(offset);
    values.assign(offset, 0.0);
  }

  std::size_t num_nodes() const { return offset_.back(); }
  std::size_t num_classes() const { return classes_.size(); }
  const std::vector<std::size_t>& class_states(std::size_t c) const { return classes_[c]; }
  const SimplexGrid& grid(std::size_t c) const { return grids_[c]; }
  std::size_t offset(std::size_t c) const { return offset_[c]; }
  std::size_t num_states() const { return state_class_.size(); }

  // Belief at global node k.
  Belief node_belief(std::size_t c, std::size_t k) const {
    std::vector<double> p(num_states(), 0.0);
    const std::vector<double> x = grids_[c].point(k);
    for (std::size_t a = 0; a < x.size(); ++a) p[classes_[c][a]] = x[a];
    return Belief(std::move(p));
  }

  // Global stencil of p: class masses times the class-conditional stencil.
  void stencil(const Belief& p, Stencil& out) const {
    out.clear();
    Stencil local;
    std::vector<double> x;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      double mass = 0.0;
      for (std::size_t s : classes_[c]) mass += p[s];
      if (!(mass > 0.0)) continue;
      x.assign(classes_[c].size(), 0.0);
      for (std::size_t a = 0; a < classes_[c].size(); ++a) x[a] = p[classes_[c][a]] / mass;
      grids_[c].interpolate(x, local);
      for (auto [k, wgt] : local) out.emplace_back(static_cast<std::uint32_t>(offset_[c] + k), mass * wgt);
    }
  }

  double operator()(const Belief& p) const {
    if (p.size() != num_states()) fail(ErrorCode::kDimensionMismatch, "belief size does not match the grid");
    Stencil s;
    stencil(p, s);
    double v = 0.0;
    for (auto [k, wgt] : s) v += wgt * values[k];
    return v;
  }

  // Largest value difference between grid neighbours (one unit moved between
  // two coordinates).
  double max_adjacent_jump() const {
    double m = 0.0;
    std::vector<int> comp;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const SimplexGrid& g = grids_[c];
      const std::size_t n = g.vertices();
      for (std::size_t k = 0; k < g.size(); ++k) {
        auto node = g.node(k);
        for (std::size_t a = 0; a < n; ++a) {
          if (node[a] == 0) continue;
          for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            comp.assign(node.begin(), node.end());
            comp[a] -= 1;
            comp[b] += 1;
            const std::int64_t nb = g.find(comp);
            if (nb >= 0) m = std::max(m, std::abs(values[offset_[c] + k] - values[offset_[c] + static_cast<std::size_t>(nb)]));
          }
        }
      }
    }
    return m;
  }

  std::vector<double> values;
  double error_bound = 0.0;
  std::size_t iterations = 0;

 private:
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<SimplexGrid> grids_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> state_class_, state_pos_;
};

// Value on a 1-D belief coordinate p in [0,1].
struct LineValueFn {
  LineGrid grid;
  std::vector<double> values;
  double error_bound = 0.0;
  std::size_t iterations = 0;

  double operator()(double p) const { return grid.evaluate(values, p); }
};

}  // namespace sdg
