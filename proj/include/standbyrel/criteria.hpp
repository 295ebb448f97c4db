#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "standbyrel/markov.hpp"

namespace standbyrel {

enum class Verdict { Holds, DoesNotHold, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::DoesNotHold: return "does_not_hold";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "?";
}

/// Verdict of a parametric ordering rule. Sufficient rules never return
/// DoesNotHold unless a proven necessary condition is violated.
struct CriterionResult {
  Verdict verdict = Verdict::NotApplicable;
  std::string rule;
  bool necessary_and_sufficient = false;
  std::string reason;
  /// lhs - rhs of the deciding inequality when there is one.
  double margin = 0.0;
  /// Valid only above `threshold` in the repair rate.
  bool asymptotic = false;
  std::optional<double> threshold;

  bool holds() const { return verdict == Verdict::Holds; }
};

namespace detail {

inline double positive_part(double x) { return std::max(x, 0.0); }

/// lhs >= rhs up to rounding of the inputs.
inline bool geq(double lhs, double rhs) {
  return lhs >= rhs - 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

inline CriterionResult iff(bool holds, std::string rule, double margin, std::string reason = {}) {
  CriterionResult r;
  r.verdict = holds ? Verdict::Holds : Verdict::DoesNotHold;
  r.rule = std::move(rule);
  r.necessary_and_sufficient = true;
  r.margin = margin;
  r.reason = std::move(reason);
  return r;
}

inline CriterionResult sufficient(bool fired, std::string rule, std::string reason = {}) {
  CriterionResult r;
  r.verdict = fired ? Verdict::Holds : Verdict::NotApplicable;
  r.rule = std::move(rule);
  r.reason = std::move(reason);
  return r;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Warm standby, both systems starting with a unit in standby.

/// lr iff 2(l21 - l11) - l12 + l22 + mu2 - mu1 >= (a2 - a1)^+.
inline CriterionResult warm_lr_iff(const WarmConfig& s1, const WarmConfig& s2) {
  const double lhs = 2.0 * (s2.lambda1 - s1.lambda1) - s1.lambda2 + s2.lambda2 + s2.mu - s1.mu;
  const double rhs = detail::positive_part(s2.a() - s1.a());
  return detail::iff(detail::geq(lhs, rhs), "warm_lr_iff", lhs - rhs);
}

/// mu1 >= mu2, l11 <= l21 and 2(l21 - l11) - l12 + l22 + mu2 - mu1 >= 0.
inline CriterionResult warm_lr_sufficient(const WarmConfig& s1, const WarmConfig& s2) {
  const double cond = 2.0 * (s2.lambda1 - s1.lambda1) - s1.lambda2 + s2.lambda2 + s2.mu - s1.mu;
  const bool fired = s1.mu >= s2.mu && s1.lambda1 <= s2.lambda1 && cond >= 0.0;
  return detail::sufficient(fired, "warm_lr_sufficient", fired ? "" : "hypotheses not met");
}

/// Shared unit rates: mu1 >= mu2 iff system 1 >=_hr system 2.
inline CriterionResult warm_hr_iff_equal_lifetimes(double lambda1, double lambda2, double mu1, double mu2) {
  (void)lambda1;
  (void)lambda2;
  return detail::iff(mu1 >= mu2, "warm_hr_iff_equal_lifetimes", mu1 - mu2);
}

inline CriterionResult warm_hr_iff_equal_lifetimes(const WarmConfig& s1, const WarmConfig& s2) {
  if (s1.lambda1 != s2.lambda1 || s1.lambda2 != s2.lambda2) {
    return detail::sufficient(false, "warm_hr_iff_equal_lifetimes", "unit failure rates differ");
  }
  return warm_hr_iff_equal_lifetimes(s1.lambda1, s1.lambda2, s1.mu, s2.mu);
}

/// l11 <= l21, mu1 >= mu2 and 2(l21 - l11) >= l12 - l22.
inline CriterionResult warm_hr_sufficient(const WarmConfig& s1, const WarmConfig& s2) {
  const bool fired = s1.lambda1 <= s2.lambda1 && s1.mu >= s2.mu &&
                     2.0 * (s2.lambda1 - s1.lambda1) >= s1.lambda2 - s2.lambda2;
  return detail::sufficient(fired, "warm_hr_sufficient", fired ? "" : "hypotheses not met");
}

// --------------------------------------------------------------------------
// Cold standby, both systems starting with a unit in standby.

/// lr iff 2(l2 - l1) + mu2 - mu1 >= (b2 - b1)^+.
inline CriterionResult cold_lr_iff(const ColdConfig& s1, const ColdConfig& s2) {
  const double lhs = 2.0 * (s2.lambda - s1.lambda) + s2.mu - s1.mu;
  const double rhs = detail::positive_part(s2.b() - s1.b());
  auto r = detail::iff(detail::geq(lhs, rhs), "cold_lr_iff", lhs - rhs);
  if (s1.lambda > s2.lambda) r.reason = "necessary condition lambda1 <= lambda2 violated";
  return r;
}

/// Fires on either 2(l2 - l1) >= mu1 - mu2 with mu1 >= mu2, or on
/// mu1 <= mu2 with l2 >= 2 max{l1, mu2}.
inline CriterionResult cold_lr_sufficient_rules(const ColdConfig& s1, const ColdConfig& s2) {
  if (2.0 * (s2.lambda - s1.lambda) >= s1.mu - s2.mu && s1.mu >= s2.mu) {
    return detail::sufficient(true, "cold_lr_faster_repair");
  }
  if (s1.mu <= s2.mu && s2.lambda >= 2.0 * std::max(s1.lambda, s2.mu)) {
    return detail::sufficient(true, "cold_lr_fragile_second_system");
  }
  return detail::sufficient(false, "cold_lr_sufficient_rules", "neither rule fires; use cold_lr_iff");
}

inline CriterionResult cold_hr_iff_equal_lifetimes(double lambda, double mu1, double mu2) {
  (void)lambda;
  return detail::iff(mu1 >= mu2, "cold_hr_iff_equal_lifetimes", mu1 - mu2);
}

inline CriterionResult cold_hr_iff_equal_lifetimes(const ColdConfig& s1, const ColdConfig& s2) {
  if (s1.lambda != s2.lambda) {
    return detail::sufficient(false, "cold_hr_iff_equal_lifetimes", "unit failure rates differ");
  }
  return cold_hr_iff_equal_lifetimes(s1.lambda, s1.mu, s2.mu);
}

/// l1 <= l2 with mu1/mu2 >= (l1/l2)^2; otherwise the direct certificate
/// l1 <= l2, l1^2 (2 l2 + mu2) <= l2^2 (2 l1 + mu1) and l1^2 b2 <= l2^2 b1.
inline CriterionResult cold_hr_sufficient(const ColdConfig& s1, const ColdConfig& s2) {
  const double l1 = s1.lambda, l2 = s2.lambda, m1 = s1.mu, m2 = s2.mu;
  if (l1 > l2) return detail::sufficient(false, "cold_hr_sufficient", "requires lambda1 <= lambda2");
  if (m1 * l2 * l2 >= m2 * l1 * l1) return detail::sufficient(true, "cold_hr_repair_ratio");
  const bool constant_terms = l1 * l1 * (2.0 * l2 + m2) <= l2 * l2 * (2.0 * l1 + m1);
  const bool coth_terms = std::pow(l1, 4) * (m2 * m2 + 4.0 * l2 * m2) <= std::pow(l2, 4) * (m1 * m1 + 4.0 * l1 * m1);
  if (constant_terms && coth_terms) return detail::sufficient(true, "cold_hr_direct_certificate");
  return detail::sufficient(false, "cold_hr_sufficient", "hypotheses not met");
}

// --------------------------------------------------------------------------
// Systems starting with one unit under repair.

/// l11 <= l21, mu1 >= mu2 and l12 / l22 <= mu1 / mu2; l11 <= l21 is necessary.
inline CriterionResult warm_star_hr_sufficient(const WarmConfig& s1, const WarmConfig& s2) {
  if (s1.lambda1 > s2.lambda1) {
    CriterionResult r;
    r.verdict = Verdict::DoesNotHold;
    r.rule = "warm_star_hr_necessity";
    r.reason = "necessary condition lambda11 <= lambda21 violated (hazards at t = 0)";
    return r;
  }
  const bool fired = s1.mu >= s2.mu && s1.lambda2 * s2.mu <= s2.lambda2 * s1.mu;
  return detail::sufficient(fired, "warm_star_hr_sufficient", fired ? "" : "hypotheses not met");
}

inline CriterionResult cold_star_hr_sufficient(const ColdConfig& s1, const ColdConfig& s2) {
  auto r = warm_star_hr_sufficient(s1.as_warm(), s2.as_warm());
  if (r.rule == "warm_star_hr_sufficient") r.rule = "cold_star_hr_sufficient";
  return r;
}

// --------------------------------------------------------------------------
// Large common repair rate.

/// a2(mu) - a1(mu) for the two lambda pairs at a shared repair rate.
inline double lr_gap(double l11, double l12, double l21, double l22, double mu) {
  return WarmConfig{l21, l22, mu}.a() - WarmConfig{l11, l12, mu}.a();
}

/// d/dmu of lr_gap.
inline double lr_gap_derivative(double l11, double l12, double l21, double l22, double mu) {
  return (mu + l22 + 2.0 * l21) / WarmConfig{l21, l22, mu}.a() - (mu + l12 + 2.0 * l11) / WarmConfig{l11, l12, mu}.a();
}

/// With mu1 = mu2 = mu large, lr holds iff 2(l21 - l11) - l12 + l22 >= 0.
/// The threshold above which the exact lr criterion holds is located by
/// bisection on [1e-6, 1e6] to 1e-6 absolute; 0 when it holds for every mu.
inline CriterionResult large_mu_asymptotic_lr(double l11, double l12, double l21, double l22) {
  const double lhs = 2.0 * (l21 - l11) - l12 + l22;
  CriterionResult r;
  r.rule = "large_mu_asymptotic_lr";
  r.necessary_and_sufficient = true;
  r.asymptotic = true;
  r.margin = lhs;
  if (!(lhs >= 0.0)) {
    r.verdict = Verdict::DoesNotHold;
    r.reason = "fails for all sufficiently large mu";
    return r;
  }
  r.verdict = Verdict::Holds;
  const auto exact = [&](double mu) {
    return warm_lr_iff(WarmConfig{l11, l12, mu}, WarmConfig{l21, l22, mu}).holds();
  };
  double lo = 1e-6, hi = 1e6;
  if (exact(0.0) && exact(lo)) {
    r.threshold = 0.0;
    return r;
  }
  if (!exact(hi)) {
    r.reason = "exact criterion not yet satisfied at mu = 1e6";
    return r;
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (exact(mid)) hi = mid; else lo = mid;
  }
  r.threshold = hi;
  return r;
}

/// Same check for two warm configs; their repair rates are ignored.
inline CriterionResult large_mu_asymptotic_lr(const WarmConfig& s1, const WarmConfig& s2) {
  return large_mu_asymptotic_lr(s1.lambda1, s1.lambda2, s2.lambda1, s2.lambda2);
}

}  // namespace standbyrel
