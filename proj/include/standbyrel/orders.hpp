#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "standbyrel/curve.hpp"
#include "standbyrel/dists.hpp"
#include "standbyrel/errors.hpp"
#include "standbyrel/markov.hpp"
#include "standbyrel/quadrature.hpp"

namespace standbyrel {

/// Curve provider: whatever a lifetime law can tell the order checkers.
/// `survival` is mandatory; the rest are optional and derived when missing.
struct LifetimeLaw {
  std::string name;
  std::function<double(double)> survival;
  std::function<double(double)> density;
  std::function<double(double)> log_density;
  std::function<double(double)> hazard;
  std::function<double(double)> laplace_survival;
  /// Integral of the survival over [0, t]; used for icv when both laws have it.
  std::function<double(double)> partial_mean;
  /// Characteristic (largest) rate, for grid scaling.
  double rate_scale = 1.0;
  /// True when all members are closed-form; selects the tighter default tolerance.
  bool closed_form = false;

  bool has_density() const { return static_cast<bool>(density) || static_cast<bool>(log_density); }

  double log_density_at(double t) const {
    if (log_density) return log_density(t);
    return std::log(density(t));
  }

  double hazard_at(double t) const {
    if (hazard) return hazard(t);
    const double s = survival(t);
    return s > 0.0 ? density(t) / s : std::numeric_limits<double>::infinity();
  }
};

inline LifetimeLaw warm_law(const WarmConfig& cfg, InitialState state) {
  std::ostringstream name;
  name << (cfg.lambda2 == 0.0 ? "cold(" : "warm(") << cfg.lambda1 << ',' << cfg.lambda2 << ',' << cfg.mu << ','
       << to_string(state) << ')';
  LifetimeLaw law;
  law.name = name.str();
  law.survival = [cfg, state](double t) { return warm_survival(cfg, state, t); };
  law.density = [cfg, state](double t) { return warm_density(cfg, state, t); };
  law.log_density = [cfg, state](double t) { return warm_log_density(cfg, state, t); };
  law.hazard = [cfg, state](double t) { return warm_hazard(cfg, state, t); };
  law.laplace_survival = [cfg, state](double s) { return warm_laplace_survival(cfg, state, s); };
  law.rate_scale = cfg.max_rate();
  law.closed_form = true;
  return law;
}

inline LifetimeLaw cold_law(const ColdConfig& cfg, InitialState state) { return warm_law(cfg.as_warm(), state); }

inline LifetimeLaw distribution_law(const Distribution& d) {
  LifetimeLaw law;
  law.name = d.literal();
  law.survival = [d](double t) { return d.survival(t); };
  if (d.has_density()) law.density = [d](double t) { return *d.density(t); };
  law.laplace_survival = [d](double s) { return d.laplace_survival(s); };
  law.partial_mean = [d](double t) { return d.partial_mean(t); };
  law.rate_scale = d.rate_scale();
  law.closed_form = !std::holds_alternative<Weibull>(d.kind());
  return law;
}

// ---------------------------------------------------------------------------

/// Ranked weakest to strongest: lr => hr => st => icv => lt.
enum class OrderRelation { lt = 0, icv = 1, st = 2, hr = 3, lr = 4 };

inline constexpr std::array<OrderRelation, 5> kAllRelations = {
    OrderRelation::lt, OrderRelation::icv, OrderRelation::st, OrderRelation::hr, OrderRelation::lr};

inline const char* to_string(OrderRelation r) {
  switch (r) {
    case OrderRelation::lt: return "lt";
    case OrderRelation::icv: return "icv";
    case OrderRelation::st: return "st";
    case OrderRelation::hr: return "hr";
    case OrderRelation::lr: return "lr";
  }
  return "?";
}

inline OrderRelation parse_relation(std::string_view s) {
  for (auto r : kAllRelations) if (s == to_string(r)) return r;
  throw ValidationError("unknown relation '" + std::string(s) + "'");
}

enum class VerdictStatus { Holds, Fails, Inconclusive };
enum class Method { Analytic, Numeric };

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Holds: return "holds";
    case VerdictStatus::Fails: return "fails";
    case VerdictStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}
inline const char* to_string(Method m) { return m == Method::Analytic ? "analytic" : "numeric"; }

/// Outcome of "A >= B in `relation`". For Fails, `witness` is the time (or
/// transform point for lt) where the defining inequality lhs >= rhs is
/// violated beyond tolerance, with the values there.
struct OrderVerdict {
  OrderRelation relation = OrderRelation::st;
  VerdictStatus status = VerdictStatus::Holds;
  Method method = Method::Numeric;
  double witness = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();

  bool holds() const { return status == VerdictStatus::Holds; }
  bool fails() const { return status == VerdictStatus::Fails; }
  bool conclusive() const { return status != VerdictStatus::Inconclusive; }
};

struct CheckOptions {
  double tol = 0.0;                 // 0 selects 1e-9 (closed form) or 1e-6 (quadrature-backed)
  std::vector<double> s_grid;       // lt transform points; empty selects 61 log points on [1e-3, 1e3]
};

/// Default time grid: 400 log-spaced points from 1e-4 / max-rate to the time
/// where both survivals are below 1e-8.
inline std::vector<double> default_order_grid(const LifetimeLaw& a, const LifetimeLaw& b, std::size_t n = 400) {
  const double rate = std::max(a.rate_scale, b.rate_scale);
  const double t_min = 1e-4 / rate;
  const double t_max = std::max({tail_time(a.survival, 1e-8, 1.0 / rate), tail_time(b.survival, 1e-8, 1.0 / rate),
                                 100.0 * t_min});
  return log_grid(t_min, t_max, n);
}

inline std::vector<double> default_s_grid() { return log_grid(1e-3, 1e3, 61); }

inline double default_tolerance(const LifetimeLaw& a, const LifetimeLaw& b) {
  return a.closed_form && b.closed_form ? 1e-9 : 1e-6;
}

/// Laplace transform of the survival by quadrature on [0, T], T the 1e-14 tail
/// or 40 / s, whichever is shorter.
inline double numeric_laplace_survival(const LifetimeLaw& law, double s) {
  const double hi = std::min(tail_time(law.survival, 1e-14, 1.0 / law.rate_scale), 40.0 / s);
  return integrate([&](double t) { return std::exp(-s * t) * law.survival(t); }, 0.0, hi, 1e-11).value;
}

namespace detail {

/// Folds per-point (lhs, rhs, margin) triples into a verdict.
class VerdictBuilder {
 public:
  VerdictBuilder(OrderRelation rel, double tol) : tol_(tol) { v_.relation = rel; }

  void add(double at, double lhs, double rhs, double margin) {
    if (std::isnan(margin)) return;
    const double scale = tol_ * (1.0 + std::abs(lhs) + std::abs(rhs));
    const double normalized = margin / scale;
    if (margin < v_.min_margin) v_.min_margin = margin;
    if (normalized < worst_) {
      worst_ = normalized;
      v_.witness = at;
      v_.lhs = lhs;
      v_.rhs = rhs;
    }
  }

  OrderVerdict finish() {
    if (worst_ < -1.0) {
      v_.status = VerdictStatus::Fails;
    } else if (v_.min_margin < 0.0) {
      v_.status = VerdictStatus::Inconclusive;
    } else {
      v_.status = VerdictStatus::Holds;
    }
    return v_;
  }

 private:
  double tol_;
  double worst_ = std::numeric_limits<double>::infinity();
  OrderVerdict v_;
};

}  // namespace detail

/// Decides "A >= B" in `rel` on `grid`. A deficit counts as a violation only
/// beyond tol (1 + |lhs| + |rhs|); smaller deficits give Inconclusive.
///   st : S_A(t) >= S_B(t)
///   hr : r_A(t) <= r_B(t)
///   lr : f_A / f_B nondecreasing across consecutive grid points
///   icv: int_0^t F_A <= int_0^t F_B  (cumulative trapezoid from 0)
///   lt : Shat_A(s) >= Shat_B(s) on the s-grid
inline OrderVerdict check_order(const LifetimeLaw& a, const LifetimeLaw& b, OrderRelation rel,
                                std::span<const double> grid, const CheckOptions& opts = {}) {
  const double tol = opts.tol > 0.0 ? opts.tol : default_tolerance(a, b);
  detail::VerdictBuilder vb(rel, tol);
  switch (rel) {
    case OrderRelation::st:
      for (double t : grid) {
        const double sa = a.survival(t);
        const double sb = b.survival(t);
        vb.add(t, sa, sb, sa - sb);
      }
      break;
    case OrderRelation::hr:
      if (!a.has_density() && !a.hazard) throw UnsupportedRelationError("hr needs a density or hazard for " + a.name);
      if (!b.has_density() && !b.hazard) throw UnsupportedRelationError("hr needs a density or hazard for " + b.name);
      for (double t : grid) {
        if (a.survival(t) <= 0.0 && b.survival(t) <= 0.0) continue;
        const double ra = a.hazard_at(t);
        const double rb = b.hazard_at(t);
        vb.add(t, rb, ra, rb - ra);
      }
      break;
    case OrderRelation::lr: {
      if (!a.has_density()) throw UnsupportedRelationError("lr needs a density for " + a.name);
      if (!b.has_density()) throw UnsupportedRelationError("lr needs a density for " + b.name);
      std::optional<double> prev;
      double prev_t = 0.0;
      for (double t : grid) {
        const double la = a.log_density_at(t);
        const double lb = b.log_density_at(t);
        if (!std::isfinite(la) || !std::isfinite(lb)) {
          prev.reset();
          continue;
        }
        const double ratio = la - lb;
        if (prev) vb.add(prev_t, ratio, *prev, ratio - *prev);
        prev = ratio;
        prev_t = t;
      }
      break;
    }
    case OrderRelation::icv: {
      if (a.partial_mean && b.partial_mean) {
        // int_0^t F = t - int_0^t S
        for (double t : grid) {
          const double pa = a.partial_mean(t), pb = b.partial_mean(t);
          vb.add(t, t - pb, t - pa, pa - pb);
        }
        break;
      }
      double ia = 0.0, ib = 0.0, diff = 0.0;
      double t_prev = 0.0;
      double fa_prev = 1.0 - a.survival(0.0);
      double fb_prev = 1.0 - b.survival(0.0);
      for (double t : grid) {
        if (t <= t_prev) continue;
        const double fa = 1.0 - a.survival(t);
        const double fb = 1.0 - b.survival(t);
        const double h = t - t_prev;
        ia += 0.5 * h * (fa + fa_prev);
        ib += 0.5 * h * (fb + fb_prev);
        diff += 0.5 * h * ((fb - fa) + (fb_prev - fa_prev));
        vb.add(t, ib, ia, diff);
        t_prev = t;
        fa_prev = fa;
        fb_prev = fb;
      }
      break;
    }
    case OrderRelation::lt: {
      const auto s_grid = opts.s_grid.empty() ? default_s_grid() : opts.s_grid;
      if (a.laplace_survival && b.laplace_survival) {
        for (double s : s_grid) {
          const double la = a.laplace_survival(s);
          const double lb = b.laplace_survival(s);
          vb.add(s, la, lb, la - lb);
        }
      } else {
        const double rate = std::max(a.rate_scale, b.rate_scale);
        const double hi = std::max(tail_time(a.survival, 1e-14, 1.0 / rate), tail_time(b.survival, 1e-14, 1.0 / rate));
        for (double s : s_grid) {
          const double la = a.laplace_survival ? a.laplace_survival(s) : numeric_laplace_survival(a, s);
          const double lb = b.laplace_survival ? b.laplace_survival(s) : numeric_laplace_survival(b, s);
          const double diff = integrate(
              [&](double t) { return std::exp(-s * t) * (a.survival(t) - b.survival(t)); }, 0.0, hi, 1e-11).value;
          vb.add(s, la, lb, diff);
        }
      }
      break;
    }
  }
  return vb.finish();
}

inline OrderVerdict check_order(const LifetimeLaw& a, const LifetimeLaw& b, OrderRelation rel,
                                const CheckOptions& opts = {}) {
  const auto grid = default_order_grid(a, b);
  return check_order(a, b, rel, grid, opts);
}

/// Number of sign changes of the discrete slope of log(f_A / f_B) on `grid`,
/// ignoring slopes within tolerance of zero.
inline int lr_slope_sign_changes(const LifetimeLaw& a, const LifetimeLaw& b, std::span<const double> grid,
                                 double tol = 1e-9) {
  int changes = 0;
  int last_sign = 0;
  std::optional<double> prev;
  for (double t : grid) {
    const double r = a.log_density_at(t) - b.log_density_at(t);
    if (!std::isfinite(r)) continue;
    if (prev) {
      const double slope = r - *prev;
      const double scale = tol * (1.0 + std::abs(r) + std::abs(*prev));
      const int sign = slope > scale ? 1 : (slope < -scale ? -1 : 0);
      if (sign != 0) {
        if (last_sign != 0 && sign != last_sign) ++changes;
        last_sign = sign;
      }
    }
    prev = r;
  }
  return changes;
}

// ---------------------------------------------------------------------------

struct AuditReport {
  std::array<OrderVerdict, 5> verdicts;  // indexed by OrderRelation
  /// First (stronger, weaker) pair where the stronger conclusively holds and
  /// the weaker conclusively fails.
  std::optional<std::pair<OrderRelation, OrderRelation>> violation;

  const OrderVerdict& operator[](OrderRelation r) const { return verdicts[static_cast<std::size_t>(r)]; }
};

/// Chain audit error; carries the full report.
class ChainViolationError : public ConsistencyError {
 public:
  ChainViolationError(const std::string& what, AuditReport report)
      : ConsistencyError(what), report_(std::move(report)) {}
  const AuditReport& report() const noexcept { return report_; }

 private:
  AuditReport report_;
};

/// Runs all five checks and verifies lr => hr => st => icv => lt on the
/// conclusive verdicts. Throws ChainViolationError with both witnesses.
inline AuditReport implication_audit(const LifetimeLaw& a, const LifetimeLaw& b, std::span<const double> grid,
                                     const CheckOptions& opts = {}) {
  AuditReport report;
  for (auto r : kAllRelations) {
    if (r == OrderRelation::lr && (!a.has_density() || !b.has_density())) {
      OrderVerdict skipped;
      skipped.relation = r;
      skipped.status = VerdictStatus::Inconclusive;
      report.verdicts[static_cast<std::size_t>(r)] = skipped;
      continue;
    }
    if (r == OrderRelation::hr && (!a.has_density() && !a.hazard || !b.has_density() && !b.hazard)) {
      OrderVerdict skipped;
      skipped.relation = r;
      skipped.status = VerdictStatus::Inconclusive;
      report.verdicts[static_cast<std::size_t>(r)] = skipped;
      continue;
    }
    report.verdicts[static_cast<std::size_t>(r)] = check_order(a, b, r, grid, opts);
  }
  for (int strong = 4; strong > 0 && !report.violation; --strong) {
    if (!report.verdicts[strong].holds()) continue;
    for (int weak = strong - 1; weak >= 0; --weak) {
      if (report.verdicts[weak].fails()) {
        report.violation = {static_cast<OrderRelation>(strong), static_cast<OrderRelation>(weak)};
        break;
      }
    }
  }
  if (report.violation) {
    const auto [s, w] = *report.violation;
    std::ostringstream os;
    os << "implication chain violated: " << to_string(s) << " holds (min margin " << report[s].min_margin
       << ", last checked at " << report[s].witness << ") but " << to_string(w) << " fails at witness "
       << report[w].witness << " (lhs " << report[w].lhs << ", rhs " << report[w].rhs << ")";
    throw ChainViolationError(os.str(), report);
  }
  return report;
}

inline AuditReport implication_audit(const LifetimeLaw& a, const LifetimeLaw& b, const CheckOptions& opts = {}) {
  const auto grid = default_order_grid(a, b);
  return implication_audit(a, b, grid, opts);
}

}  // namespace standbyrel
