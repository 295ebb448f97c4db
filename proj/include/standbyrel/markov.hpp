#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "standbyrel/curve.hpp"
#include "standbyrel/errors.hpp"

namespace standbyrel {

/// One unit working, the other either in standby or under repair at t = 0.
enum class InitialState { FreshPair, DegradedStart };

inline const char* to_string(InitialState s) {
  return s == InitialState::FreshPair ? "fresh" : "degraded";
}

/// Exponential warm standby system: principal failure rate lambda1, standby
/// failure rate lambda2, repair rate mu. lambda2 = 0 is the cold system.
struct WarmConfig {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double mu = 0.0;

  static WarmConfig make(double lambda1, double lambda2, double mu) {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
      throw ValidationError("principal failure rate must be positive, got " + std::to_string(lambda1));
    }
    if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
      throw ValidationError("standby failure rate must be nonnegative, got " + std::to_string(lambda2));
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
      throw ValidationError("repair rate must be nonnegative, got " + std::to_string(mu));
    }
    return {lambda1, lambda2, mu};
  }

  /// 2 lambda1 + lambda2 + mu.
  double c() const noexcept { return 2.0 * lambda1 + lambda2 + mu; }
  /// sqrt((lambda2 + mu)^2 + 4 lambda1 mu); 0 <= a < c.
  double a() const noexcept { return std::sqrt((lambda2 + mu) * (lambda2 + mu) + 4.0 * lambda1 * mu); }
  /// lambda1 (lambda1 + lambda2) = (c^2 - a^2) / 4.
  double d() const noexcept { return lambda1 * (lambda1 + lambda2); }
  double max_rate() const noexcept { return std::max({lambda1, lambda2, mu}); }

  bool operator==(const WarmConfig&) const = default;
};

/// Exponential cold standby system (spare cannot fail).
struct ColdConfig {
  double lambda = 1.0;
  double mu = 0.0;

  static ColdConfig make(double lambda, double mu) {
    WarmConfig::make(lambda, 0.0, mu);
    return {lambda, mu};
  }

  WarmConfig as_warm() const noexcept { return {lambda, 0.0, mu}; }
  /// sqrt(mu (4 lambda + mu)).
  double b() const noexcept { return std::sqrt(mu * (4.0 * lambda + mu)); }

  bool operator==(const ColdConfig&) const = default;
};

namespace detail {

/// exp(-ct/2) cosh(at/2) and exp(-ct/2) sinh(at/2)/a, evaluated without
/// overflow using the slow decay rate (c - a)/2 = 2d/(c + a).
struct HyperbolicTerms {
  double ec;
  double es;
};

inline double slow_decay(const WarmConfig& cfg) { return 2.0 * cfg.d() / (cfg.c() + cfg.a()); }

/// (1 - exp(-a t)) / a, with the a -> 0 limit t.
inline double one_minus_exp_over(double a, double t) {
  if (a == 0.0) return t;
  return -std::expm1(-a * t) / a;
}

inline HyperbolicTerms hyperbolic_terms(const WarmConfig& cfg, double t) {
  const double a = cfg.a();
  const double envelope = std::exp(-slow_decay(cfg) * t);
  return {envelope * 0.5 * (1.0 + std::exp(-a * t)), envelope * 0.5 * one_minus_exp_over(a, t)};
}

inline void check_time(double t) {
  if (!(t >= 0.0) || std::isnan(t)) throw ValidationError("time must be nonnegative, got " + std::to_string(t));
}

}  // namespace detail

/// Survival function of the warm system lifetime.
inline double warm_survival(const WarmConfig& cfg, InitialState state, double t) {
  detail::check_time(t);
  const auto h = detail::hyperbolic_terms(cfg, t);
  const double coef = state == InitialState::FreshPair ? cfg.c() : cfg.lambda2 + cfg.mu;
  return h.ec + coef * h.es;
}

/// Density of the warm system lifetime.
inline double warm_density(const WarmConfig& cfg, InitialState state, double t) {
  detail::check_time(t);
  const auto h = detail::hyperbolic_terms(cfg, t);
  if (state == InitialState::FreshPair) return 2.0 * cfg.d() * h.es;
  return cfg.lambda1 * (h.ec + (cfg.lambda2 - cfg.mu) * h.es);
}

/// Natural log of the density; finite far into the tail where the density
/// itself underflows. -inf at t = 0 for FreshPair.
inline double warm_log_density(const WarmConfig& cfg, InitialState state, double t) {
  detail::check_time(t);
  const double a = cfg.a();
  const double log_env = -detail::slow_decay(cfg) * t;
  const double e = std::exp(-a * t);
  const double s = 0.5 * detail::one_minus_exp_over(a, t);
  if (state == InitialState::FreshPair) {
    if (t == 0.0) return -INFINITY;
    return log_env + std::log(2.0 * cfg.d()) + std::log(s);
  }
  return log_env + std::log(cfg.lambda1) + std::log(0.5 * (1.0 + e) + (cfg.lambda2 - cfg.mu) * s);
}

/// Hazard rate. FreshPair uses 2d / (c + a coth(at/2)) with value 0 at t = 0;
/// DegradedStart uses lambda1 (a + (lambda2 - mu) tanh) / (a + (lambda2 + mu) tanh).
inline double warm_hazard(const WarmConfig& cfg, InitialState state, double t) {
  detail::check_time(t);
  const double a = cfg.a();
  const double e = std::exp(-a * t);
  if (state == InitialState::FreshPair) {
    if (t == 0.0) return 0.0;
    // a coth(at/2) = (1 + e^{-at}) / ((1 - e^{-at}) / a)
    const double a_coth = (1.0 + e) / detail::one_minus_exp_over(a, t);
    return 2.0 * cfg.d() / (cfg.c() + a_coth);
  }
  // tanh(at/2)/a = ((1 - e^{-at})/a) / (1 + e^{-at})
  const double tanh_over_a = detail::one_minus_exp_over(a, t) / (1.0 + e);
  return cfg.lambda1 * (1.0 + (cfg.lambda2 - cfg.mu) * tanh_over_a) /
         (1.0 + (cfg.lambda2 + cfg.mu) * tanh_over_a);
}

/// Laplace transform of the survival function: [(sI - Q_T)^{-1} 1]_start,
/// with Q_T the generator restricted to the two up states.
inline double warm_laplace_survival(const WarmConfig& cfg, InitialState state, double s) {
  if (!(s >= 0.0)) throw ValidationError("transform variable must be nonnegative");
  const double det = s * s + cfg.c() * s + cfg.d();
  const double num = state == InitialState::FreshPair ? s + cfg.c() : s + cfg.lambda1 + cfg.lambda2 + cfg.mu;
  return num / det;
}

/// Mean lifetime (transform at s = 0).
inline double warm_mean(const WarmConfig& cfg, InitialState state) {
  return warm_laplace_survival(cfg, state, 0.0);
}

/// Time at which the survival drops below `eps`.
inline double warm_tail_time(const WarmConfig& cfg, InitialState state, double eps) {
  return tail_time([&](double t) { return warm_survival(cfg, state, t); }, eps, 1.0 / cfg.max_rate());
}

inline double cold_survival(const ColdConfig& cfg, InitialState state, double t) {
  return warm_survival(cfg.as_warm(), state, t);
}
inline double cold_density(const ColdConfig& cfg, InitialState state, double t) {
  return warm_density(cfg.as_warm(), state, t);
}
inline double cold_hazard(const ColdConfig& cfg, InitialState state, double t) {
  return warm_hazard(cfg.as_warm(), state, t);
}
inline double cold_log_density(const ColdConfig& cfg, InitialState state, double t) {
  return warm_log_density(cfg.as_warm(), state, t);
}
inline double cold_laplace_survival(const ColdConfig& cfg, InitialState state, double s) {
  return warm_laplace_survival(cfg.as_warm(), state, s);
}

// ---------------------------------------------------------------------------
// Aging classes

enum class AgingClass { ILR, DLR };

inline const char* to_string(AgingClass c) { return c == AgingClass::ILR ? "ILR" : "DLR"; }

struct AgingCertificate {
  double shift;                 // t in f(x + t) / f(x)
  bool passed;
  double worst_violation;       // largest slope against the asserted direction
  double witness;               // x where it occurred
};

struct AgingReport {
  AgingClass asserted;
  std::vector<AgingCertificate> certificates;
  bool passed() const {
    for (const auto& c : certificates) if (!c.passed) return false;
    return true;
  }
};

/// FreshPair lifetimes are ILR, DegradedStart lifetimes are DLR. The claim is
/// certified by checking that log f(x + t) - log f(x) is monotone in x in the
/// asserted direction on a log grid, for t in {0.1, 1, 10}. Throws
/// ConsistencyError when a certificate fails.
inline AgingReport aging_class(const WarmConfig& cfg, InitialState state, double tol = 1e-9,
                               std::size_t points = 200) {
  AgingReport report{state == InitialState::FreshPair ? AgingClass::ILR : AgingClass::DLR, {}};
  const double x_lo = 1e-4 / cfg.max_rate();
  const double x_hi = std::max(warm_tail_time(cfg, state, 1e-8), 10.0 * x_lo);
  const auto xs = log_grid(x_lo, x_hi, points);
  const double direction = report.asserted == AgingClass::ILR ? 1.0 : -1.0;
  for (double shift : {0.1, 1.0, 10.0}) {
    AgingCertificate cert{shift, true, 0.0, 0.0};
    double prev = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double g = warm_log_density(cfg, state, xs[i] + shift) - warm_log_density(cfg, state, xs[i]);
      if (i > 0) {
        // ILR: g nonincreasing, so (g - prev) must not be positive.
        const double against = direction * (g - prev);
        if (against > cert.worst_violation) {
          cert.worst_violation = against;
          cert.witness = xs[i - 1];
        }
        if (against > tol * (1.0 + std::abs(g) + std::abs(prev))) cert.passed = false;
      }
      prev = g;
    }
    report.certificates.push_back(cert);
  }
  if (!report.passed()) {
    for (const auto& c : report.certificates) {
      if (!c.passed) {
        throw ConsistencyError(std::string("aging certificate failed for ") + to_string(report.asserted) +
                               " at shift " + std::to_string(c.shift) + ", x = " + std::to_string(c.witness));
      }
    }
  }
  return report;
}

inline AgingReport aging_class(const ColdConfig& cfg, InitialState state, double tol = 1e-9) {
  return aging_class(cfg.as_warm(), state, tol);
}

}  // namespace standbyrel
