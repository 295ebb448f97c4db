#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "standbyrel/errors.hpp"

namespace standbyrel {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b], falling back to tanh-sinh for
/// endpoint singularities. Throws QuadratureError when neither error estimate
/// is below `abs_tol` (scaled by the L1 norm for large integrands).
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                           unsigned max_depth = 15) {
  if (!(b > a)) return {};
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, 1e-13, &error, &l1);
  if (std::isfinite(value) && error <= std::max(abs_tol, 1e-12 * l1)) return {value, error};
  boost::math::quadrature::tanh_sinh<double> ts;
  double ts_error = 0.0;
  double ts_l1 = 0.0;
  const double ts_value = ts.integrate(f, a, b, 1e-13, &ts_error, &ts_l1);
  if (!std::isfinite(ts_value)) {
    throw QuadratureError("quadrature produced a non-finite value", ts_error);
  }
  // tanh-sinh reports a relative estimate.
  ts_error *= ts_l1;
  if (ts_error > std::max(abs_tol, 1e-12 * ts_l1)) {
    throw QuadratureError("quadrature did not converge", std::min(error, ts_error));
  }
  return {ts_value, ts_error};
}

/// Integrates over [a, b] split at the interior `breaks`; discontinuities of
/// the integrand must be listed there.
template <typename F>
QuadratureResult integrate_split(F&& f, double a, double b, std::vector<double> breaks,
                                 double abs_tol = 1e-10) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  QuadratureResult total;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo) continue;
    if (x > b) break;
    const auto piece = integrate(f, lo, x, abs_tol);
    total.value += piece.value;
    total.error += piece.error;
    lo = x;
  }
  return total;
}

}  // namespace standbyrel
