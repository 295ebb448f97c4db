#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "standbyrel/errors.hpp"

namespace standbyrel {

/// A time grid paired with function values. The grid is strictly increasing
/// and nonnegative; values are finite.
class Curve {
 public:
  Curve() = default;

  Curve(std::vector<double> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size()) {
      throw ValidationError("curve: grid and values differ in length");
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!std::isfinite(grid_[i]) || grid_[i] < 0.0) {
        throw ValidationError("curve: grid point " + std::to_string(i) + " is negative or non-finite");
      }
      if (i > 0 && !(grid_[i] > grid_[i - 1])) {
        throw ValidationError("curve: grid not strictly increasing at index " + std::to_string(i));
      }
      if (!std::isfinite(values_[i])) {
        throw ValidationError("curve: non-finite value at index " + std::to_string(i));
      }
    }
  }

  /// Samples `f` on `grid`.
  template <typename F>
  static Curve sample(std::span<const double> grid, F&& f) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v;
    v.reserve(g.size());
    for (double t : g) v.push_back(f(t));
    return Curve(std::move(g), std::move(v));
  }

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return grid_.size(); }
  bool empty() const noexcept { return grid_.empty(); }

  /// Piecewise-linear interpolation; clamps outside the grid.
  double at(double t) const {
    if (grid_.empty()) throw ValidationError("curve: empty");
    if (t <= grid_.front()) return values_.front();
    if (t >= grid_.back()) return values_.back();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const auto hi = static_cast<std::size_t>(it - grid_.begin());
    const auto lo = hi - 1;
    const double w = (t - grid_[lo]) / (grid_[hi] - grid_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
  }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// `n` equally spaced points on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo) || lo < 0.0) {
    throw ValidationError("linear_grid: need n >= 2 and 0 <= lo < hi");
  }
  std::vector<double> g(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

/// `n` logarithmically spaced points on [lo, hi], lo > 0.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw ValidationError("log_grid: need n >= 2 and 0 < lo < hi");
  }
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Smallest t (within a factor-of-2 bracket refined by bisection) where a
/// nonincreasing `survival` drops below `eps`, starting the search at `t0`.
template <typename F>
double tail_time(F&& survival, double eps, double t0) {
  double hi = std::max(t0, 1e-12);
  int guard = 0;
  while (survival(hi) >= eps) {
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi)) {
      throw ValidationError("tail_time: survival never drops below threshold");
    }
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (survival(mid) >= eps) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace standbyrel
