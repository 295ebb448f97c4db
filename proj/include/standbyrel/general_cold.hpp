#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "standbyrel/criteria.hpp"
#include "standbyrel/curve.hpp"
#include "standbyrel/dists.hpp"
#include "standbyrel/errors.hpp"
#include "standbyrel/laplace.hpp"
#include "standbyrel/orders.hpp"

namespace standbyrel {

/// Initial condition of the two-unit cold system with per-unit laws.
///   Tau0: C1 works, C2 waits       Tau1: C2 works, C1 under repair
///   Tau2: C1 works, C2 under repair Tau3: C2 works, C1 waits
enum class StartState { Tau0 = 0, Tau1 = 1, Tau2 = 2, Tau3 = 3 };

inline const char* to_string(StartState s) {
  static constexpr const char* names[] = {"tau0", "tau1", "tau2", "tau3"};
  return names[static_cast<int>(s)];
}

inline StartState parse_start(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (s == to_string(static_cast<StartState>(i))) return static_cast<StartState>(i);
  }
  throw ValidationError("unknown start state '" + std::string(s) + "'");
}

/// Relabels C1 <-> C2.
inline StartState mirror(StartState s) { return static_cast<StartState>(3 - static_cast<int>(s)); }

/// Lifetimes F1, F2 and repair times G1, G2 of units C1, C2.
struct GeneralColdConfig {
  Distribution F1;
  Distribution F2;
  Distribution G1;
  Distribution G2;
  StartState start = StartState::Tau0;

  GeneralColdConfig swapped() const { return {F2, F1, G2, G1, mirror(start)}; }

  bool all_exponential() const {
    return F1.is_exponential() && F2.is_exponential() && G1.is_exponential() && G2.is_exponential();
  }

  double max_rate() const {
    return std::max({F1.rate_scale(), F2.rate_scale(), G1.rate_scale(), G2.rate_scale()});
  }

  static GeneralColdConfig exponential(double lambda1, double lambda2, double mu1, double mu2,
                                       StartState start = StartState::Tau0) {
    return {Distribution::exponential(lambda1), Distribution::exponential(lambda2), Distribution::exponential(mu1),
            Distribution::exponential(mu2), start};
  }
};

// ---------------------------------------------------------------------------
// Mean time to failure

struct MttfResult {
  std::array<double, 4> tau{};
  double p21 = 0.0;  // P[X2 > Y1]
  double p12 = 0.0;  // P[X1 > Y2]

  double operator[](StartState s) const { return tau[static_cast<std::size_t>(s)]; }
};

/// Means of all four initial conditions from the first-step system.
inline MttfResult mttf(const GeneralColdConfig& cfg) {
  MttfResult r;
  r.p21 = prob_greater(cfg.F2, cfg.G1);
  r.p12 = prob_greater(cfg.F1, cfg.G2);
  const double den = 1.0 - r.p12 * r.p21;
  if (!(den > 1e-12)) {
    throw DivergentMttfError("mean lifetime diverges: both units are always repaired before the other fails");
  }
  const double ex1 = cfg.F1.mean();
  const double ex2 = cfg.F2.mean();
  const double t1 = (ex2 + r.p21 * ex1) / den;
  const double t2 = ex1 + r.p12 * t1;
  r.tau = {ex1 + t1, t1, t2, ex2 + t2};
  return r;
}

enum class Preference { Tau0, Tau3, Tie };

inline const char* to_string(Preference p) {
  return p == Preference::Tau0 ? "tau0" : p == Preference::Tau3 ? "tau3" : "tie";
}

struct AllocationResult {
  Preference preferred = Preference::Tie;
  /// E[tau0] - E[tau3].
  double margin = 0.0;
  MttfResult means;
  /// E[X1] P[X2>Y1] (1 - P[X1>Y2]) and E[X2] P[X1>Y2] (1 - P[X2>Y1]).
  double reduced_lhs = 0.0;
  double reduced_rhs = 0.0;
  /// E[X1] >= E[X2] and P[X2>Y1] >= P[X1>Y2].
  bool general_rule = false;
  /// Exponential lifetimes, deterministic repairs: T1/T2 <= min{1, l1/l2}.
  std::optional<bool> exp_det_rule;
  /// Names of the rules that fired, joined by "+".
  std::string rule_fired;
};

/// Which unit should start working, decided by the sign of the reduced
/// inequality (a positive multiple of E[tau0] - E[tau3]).
inline AllocationResult allocation_compare(const GeneralColdConfig& cfg) {
  AllocationResult r;
  r.means = mttf(cfg);
  const double ex1 = cfg.F1.mean(), ex2 = cfg.F2.mean();
  r.reduced_lhs = ex1 * r.means.p21 * (1.0 - r.means.p12);
  r.reduced_rhs = ex2 * r.means.p12 * (1.0 - r.means.p21);
  r.margin = r.means[StartState::Tau0] - r.means[StartState::Tau3];
  const double diff = r.reduced_lhs - r.reduced_rhs;
  const double tie_band = 1e-13 * (std::abs(r.reduced_lhs) + std::abs(r.reduced_rhs));
  r.preferred = diff > tie_band ? Preference::Tau0 : diff < -tie_band ? Preference::Tau3 : Preference::Tie;

  r.general_rule = ex1 >= ex2 && r.means.p21 >= r.means.p12;
  if (r.general_rule) r.rule_fired = "mean_and_race_dominance";
  const auto* e1 = std::get_if<Exponential>(&cfg.F1.kind());
  const auto* e2 = std::get_if<Exponential>(&cfg.F2.kind());
  const auto* d1 = std::get_if<Deterministic>(&cfg.G1.kind());
  const auto* d2 = std::get_if<Deterministic>(&cfg.G2.kind());
  if (e1 && e2 && d1 && d2 && d2->value > 0.0) {
    r.exp_det_rule = d1->value / d2->value <= std::min(1.0, e1->rate / e2->rate);
    if (*r.exp_det_rule) r.rule_fired = r.rule_fired.empty() ? "exp_det_repair_ratio" : r.rule_fired + "+exp_det_repair_ratio";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Transforms

/// Survival transforms for exponential lifetimes l1, l2 and repair rates
/// m1, m2, as exact rational functions over the common quartic
/// D = (s+l1)(s+l2)(s+l1+m2)(s+l2+m1) - l1 l2 m1 m2.
inline RationalLT laplace_phi(double l1, double l2, double m1, double m2, StartState start) {
  for (double r : {l1, l2, m1, m2}) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("rates must be positive and finite");
  }
  if (start == StartState::Tau3 || start == StartState::Tau2) return laplace_phi(l2, l1, m2, m1, mirror(start));
  using P = Polynomial;
  const P den = P::linear(l1) * P::linear(l2) * P::linear(l1 + m2) * P::linear(l2 + m1) - P{l1 * l2 * m1 * m2};
  const P n1 = P::linear(l1) * P::linear(l2 + m1) * P::linear(l1 + m2) + l2 * m1 * P::linear(l1 + m2);
  if (start == StartState::Tau1) return RationalLT(n1, den);
  // Phi0 = Fbar1 + f1 Phi1, i.e. N0 = (D + l1 N1) / (s + l1).
  const P n0 = P::linear(l2) * P::linear(l1 + m2) * P::linear(l2 + m1) + l1 * P::linear(l2) * P::linear(l1 + m2) +
               l1 * m1 * P::linear(l1 + l2 + m2);
  return RationalLT(n0, den);
}

inline RationalLT laplace_phi(const GeneralColdConfig& cfg) {
  if (!cfg.all_exponential()) throw ValidationError("rational transform needs exponential lifetimes and repairs");
  const auto rate = [](const Distribution& d) { return std::get<Exponential>(d.kind()).rate; };
  return laplace_phi(rate(cfg.F1), rate(cfg.F2), rate(cfg.G1), rate(cfg.G2), cfg.start);
}

namespace detail {

/// int e^{-sx} P(Y < x) dF(x).
inline double race_transform(const Distribution& x, const Distribution& y, double s) {
  if (const auto* ex = std::get_if<Exponential>(&x.kind())) {
    const double l = ex->rate;
    if (const auto* ey = std::get_if<Exponential>(&y.kind())) return l * ey->rate / ((s + l) * (s + l + ey->rate));
    if (const auto* dy = std::get_if<Deterministic>(&y.kind())) return l * std::exp(-(s + l) * dy->value) / (s + l);
  }
  double acc = 0.0;
  for (const auto& a : x.atoms()) acc += a.mass * y.cdf_left(a.at) * std::exp(-s * a.at);
  if (x.has_density()) {
    std::vector<double> breaks;
    for (const auto& a : y.atoms()) breaks.push_back(a.at);
    const double hi = x.upper_tail(1e-16);
    acc += integrate_split([&](double t) { return y.cdf_left(t) * std::exp(-s * t) * *x.density(t); }, 0.0, hi,
                           breaks, 1e-12)
               .value;
  }
  return acc;
}

}  // namespace detail

/// Survival transforms of all four initial conditions at s > 0, for any laws.
inline std::array<double, 4> laplace_phi_numeric(const GeneralColdConfig& cfg, double s) {
  if (!(s > 0.0)) throw ValidationError("transform variable must be positive");
  const double a = detail::race_transform(cfg.F2, cfg.G1, s);
  const double b = detail::race_transform(cfg.F1, cfg.G2, s);
  const double sb1 = cfg.F1.laplace_survival(s);
  const double sb2 = cfg.F2.laplace_survival(s);
  const double phi1 = (sb2 + a * sb1) / (1.0 - a * b);
  const double phi2 = sb1 + b * phi1;
  return {sb1 + cfg.F1.laplace_stieltjes(s) * phi1, phi1, phi2, sb2 + cfg.F2.laplace_stieltjes(s) * phi2};
}

// ---------------------------------------------------------------------------
// Allocation in the Laplace transform order

/// Exponential case: tau0 >=_lt tau3 iff N0 - N3 >= 0 on [0, inf), which is
/// decided exactly because the difference is at most quadratic.
inline CriterionResult lt_allocation_criteria(double l1, double l2, double m1, double m2) {
  if (l1 == l2) {
    return detail::iff(m1 >= m2, "lt_allocation_equal_lifetimes", m1 - m2);
  }
  if (m1 == m2) {
    auto r = detail::iff(true, "st_equality_equal_repairs", 0.0);
    r.reason = "tau0 and tau3 are equal in distribution";
    return r;
  }
  const auto t0 = laplace_phi(l1, l2, m1, m2, StartState::Tau0);
  const auto t3 = laplace_phi(l1, l2, m1, m2, StartState::Tau3);
  const Polynomial p = t0.numerator() - t3.numerator();
  double scale = 0.0;
  for (double c : t0.numerator().coefficients()) scale += std::abs(c);
  double min_value;
  if (p.degree() == 2 && p[2] < 0.0) {
    min_value = -INFINITY;
  } else if (p.degree() == 2 && -p[1] / (2.0 * p[2]) > 0.0) {
    min_value = p(-p[1] / (2.0 * p[2]));
  } else if (p.degree() >= 1 && p[static_cast<std::size_t>(p.degree())] < 0.0) {
    min_value = -INFINITY;
  } else {
    min_value = p(0.0);
  }
  return detail::iff(min_value >= -1e-12 * scale, "lt_allocation_transform_polynomial", min_value);
}

struct LtAllocationVerdict {
  CriterionResult rule;
  /// Transform comparison Phi0hat >= Phi3hat on the s-grid.
  OrderVerdict numeric;
};

namespace detail {

/// Time points covering both laws, with every atom and its left neighbour.
inline std::vector<double> repair_grid(const Distribution& a, const Distribution& b) {
  const double hi = std::max(a.upper_tail(1e-10), b.upper_tail(1e-10)) * 1.5 + 1e-9;
  auto grid = linear_grid(hi / 400.0, hi, 400);
  for (const auto* d : {&a, &b}) {
    for (const auto& at : d->atoms()) {
      if (at.at > 0.0) {
        grid.push_back(at.at);
        grid.push_back(std::nextafter(at.at, 0.0));
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace detail

/// Shared lifetime law: tau0 >=_lt tau3 when Y1 <=_st Y2, or when Y1 <=_icv Y2
/// and the lifetime density is nonincreasing. Hypotheses are checked on grids.
inline LtAllocationVerdict lt_allocation_general(const GeneralColdConfig& cfg,
                                                 const std::vector<double>& s_grid = default_s_grid()) {
  LtAllocationVerdict out;
  out.rule.rule = "lt_allocation_repair_order";
  detail::VerdictBuilder vb(OrderRelation::lt, 1e-6);
  for (double s : s_grid) {
    const auto phi = laplace_phi_numeric(cfg, s);
    vb.add(s, phi[0], phi[3], phi[0] - phi[3]);
  }
  out.numeric = vb.finish();
  out.numeric.method = Method::Numeric;

  if (!(cfg.F1 == cfg.F2)) {
    out.rule.reason = "unit lifetimes differ";
    return out;
  }
  const auto grid = detail::repair_grid(cfg.G1, cfg.G2);
  const auto y1 = distribution_law(cfg.G1);
  const auto y2 = distribution_law(cfg.G2);
  CheckOptions opts;
  opts.tol = 1e-9;
  if (!check_order(y2, y1, OrderRelation::st, grid, opts).fails()) {
    out.rule.verdict = Verdict::Holds;
    out.rule.rule = "lt_allocation_repair_st";
    return out;
  }
  bool decreasing_density = cfg.F1.has_density();
  if (decreasing_density) {
    const auto xs = linear_grid(0.0, cfg.F1.upper_tail(1e-10), 400);
    double prev = *cfg.F1.density(xs.front());
    for (double x : xs) {
      const double f = *cfg.F1.density(x);
      if (f > prev * (1.0 + 1e-12)) decreasing_density = false;
      prev = f;
    }
  }
  // Y1 <=_icv Y2: int_0^t F_Y1 >= int_0^t F_Y2, i.e. E[min(Y1, t)] <= E[min(Y2, t)].
  detail::VerdictBuilder icv(OrderRelation::icv, 1e-9);
  for (double t : grid) {
    const double m1 = cfg.G1.partial_mean(t), m2 = cfg.G2.partial_mean(t);
    icv.add(t, m2, m1, m2 - m1);
  }
  if (decreasing_density && !icv.finish().fails()) {
    out.rule.verdict = Verdict::Holds;
    out.rule.rule = "lt_allocation_repair_icv";
    return out;
  }
  out.rule.reason = decreasing_density ? "repair times are not ordered" : "repair times not st-ordered and density not decreasing";
  return out;
}

// ---------------------------------------------------------------------------
// Comparing two systems by their means

/// Systems A and B started with their first unit working. Fires when
/// E[X_A1] >= E[X_B1], E[X_A2] >= E[X_B2], P[X_A1 > Y_A2] >= P[X_B1 > Y_B2] and
/// P[X_A2 > Y_A1] >= P[X_B2 > Y_B1]; for exponential laws these read
/// l_A1 <= l_B1, l_A2 <= l_B2, l_A1/m_A2 <= l_B1/m_B2, l_A2/m_A1 <= l_B2/m_B1.
/// Throws ConsistencyError if a fired rule is contradicted by the means.
inline CriterionResult mttf_compare(const GeneralColdConfig& a_in, const GeneralColdConfig& b_in) {
  auto normalize = [](const GeneralColdConfig& c) {
    if (c.start == StartState::Tau0) return c;
    if (c.start == StartState::Tau3) return c.swapped();
    throw ValidationError("mean comparison needs both systems started with a unit waiting");
  };
  const auto a = normalize(a_in);
  const auto b = normalize(b_in);
  const auto ma = mttf(a);
  const auto mb = mttf(b);
  CriterionResult r;
  r.margin = ma[StartState::Tau0] - mb[StartState::Tau0];
  bool fired;
  if (a.all_exponential() && b.all_exponential()) {
    const auto rate = [](const Distribution& d) { return std::get<Exponential>(d.kind()).rate; };
    const double la1 = rate(a.F1), la2 = rate(a.F2), ma1 = rate(a.G1), ma2 = rate(a.G2);
    const double lb1 = rate(b.F1), lb2 = rate(b.F2), mb1 = rate(b.G1), mb2 = rate(b.G2);
    r.rule = "mttf_exponential_rates";
    fired = la1 <= lb1 && la2 <= lb2 && la1 * mb2 <= lb1 * ma2 && la2 * mb1 <= lb2 * ma1;
  } else {
    r.rule = "mttf_means_and_races";
    fired = a.F1.mean() >= b.F1.mean() && a.F2.mean() >= b.F2.mean() && ma.p12 >= mb.p12 && ma.p21 >= mb.p21;
  }
  r.verdict = fired ? Verdict::Holds : Verdict::NotApplicable;
  if (!fired) r.reason = "hypotheses not met";
  const double scale = 1e-10 * (1.0 + ma[StartState::Tau0] + mb[StartState::Tau0]);
  if (fired && r.margin < -scale) {
    throw ConsistencyError("mean comparison rule fired but E[tau_A] < E[tau_B]");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Time domain

struct VolterraOptions {
  /// Internal step; 0 selects 0.01 / (largest rate of the four laws).
  double step = 0.0;
  /// Richardson extrapolation against a half-step solve. Applied only when
  /// both lifetimes have densities (atoms make the solution discontinuous).
  bool extrapolate = true;
  /// Tolerated increase between consecutive nodes before RefineStepError.
  double monotone_tol = 1e-7;
};

struct VolterraSolution {
  std::array<Curve, 4> phi;
  double step = 0.0;
  bool extrapolated = false;

  const Curve& operator[](StartState s) const { return phi[static_cast<std::size_t>(s)]; }
};

namespace detail {

/// Hat-function weights of the measure P(Y < x) dF(x) (or dF(x) without Y)
/// on cells [jh, (j+1)h): left[j] = int (1 - theta) dK, right[j] = int theta dK.
struct CellWeights {
  std::vector<double> left;
  std::vector<double> right;
};

inline CellWeights cell_weights(const Distribution& x, const Distribution* y, double h, std::size_t cells) {
  CellWeights w{std::vector<double>(cells, 0.0), std::vector<double>(cells, 0.0)};
  const auto gate = [y](double t) { return y ? y->cdf_left(t) : 1.0; };
  if (x.has_density()) {
    std::vector<double> breaks;
    if (y) for (const auto& a : y->atoms()) breaks.push_back(a.at);
    std::sort(breaks.begin(), breaks.end());
    using GL = boost::math::quadrature::gauss<double, 10>;
    for (std::size_t j = 0; j < cells; ++j) {
      const double lo = static_cast<double>(j) * h;
      const double hi = lo + h;
      std::vector<double> pts{lo};
      for (auto it = std::upper_bound(breaks.begin(), breaks.end(), lo); it != breaks.end() && *it < hi; ++it)
        pts.push_back(*it);
      pts.push_back(hi);
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        w.left[j] += GL::integrate([&](double t) { return (1.0 - (t - lo) / h) * gate(t) * *x.density(t); },
                                   pts[k], pts[k + 1]);
        w.right[j] += GL::integrate([&](double t) { return (t - lo) / h * gate(t) * *x.density(t); },
                                    pts[k], pts[k + 1]);
      }
    }
  }
  for (const auto& a : x.atoms()) {
    const double mass = a.mass * gate(a.at);
    if (mass == 0.0) continue;
    if (a.at == 0.0) {
      w.left[0] += mass;
      continue;
    }
    const double pos = a.at / h;
    const double c = std::ceil(pos) - 1.0;
    if (c >= static_cast<double>(cells)) continue;
    const auto j = static_cast<std::size_t>(c);
    const double theta = pos - c;
    w.left[j] += (1.0 - theta) * mass;
    w.right[j] += theta * mass;
  }
  return w;
}

/// Product-integration march on nodes 0..cells with step h.
inline std::array<std::vector<double>, 4> volterra_march(const GeneralColdConfig& cfg, double h, std::size_t cells) {
  const auto k0 = cell_weights(cfg.F1, nullptr, h, cells);
  const auto k1 = cell_weights(cfg.F2, &cfg.G1, h, cells);
  const auto k2 = cell_weights(cfg.F1, &cfg.G2, h, cells);
  const auto k3 = cell_weights(cfg.F2, nullptr, h, cells);
  std::array<std::vector<double>, 4> phi;
  for (auto& v : phi) v.assign(cells + 1, 1.0);
  // Sum over m = 1..n of the node weight on src[n - m], excluding the implicit node.
  const auto history = [](const CellWeights& k, const std::vector<double>& src, std::size_t n) {
    double acc = k.right[n - 1] * src[0];
    for (std::size_t m = 1; m < n; ++m) acc += (k.left[m] + k.right[m - 1]) * src[n - m];
    return acc;
  };
  for (std::size_t n = 1; n <= cells; ++n) {
    const double t = static_cast<double>(n) * h;
    const double r1 = cfg.F2.survival(t) + history(k1, phi[2], n);
    const double r2 = cfg.F1.survival(t) + history(k2, phi[1], n);
    const double a = k1.left[0], b = k2.left[0];
    phi[1][n] = (r1 + a * r2) / (1.0 - a * b);
    phi[2][n] = r2 + b * phi[1][n];
    phi[0][n] = cfg.F1.survival(t) + k0.left[0] * phi[1][n] + history(k0, phi[1], n);
    phi[3][n] = cfg.F2.survival(t) + k3.left[0] * phi[2][n] + history(k3, phi[2], n);
  }
  return phi;
}

/// Four-point Lagrange interpolation on a uniform grid (linear when asked).
inline double uniform_interp(const std::vector<double>& v, double h, double t, bool cubic) {
  const double pos = t / h;
  const auto last = v.size() - 1;
  auto i = static_cast<std::size_t>(std::min(std::floor(pos), static_cast<double>(last)));
  if (i >= last) return v[last];
  const double u = pos - static_cast<double>(i);
  if (!cubic || v.size() < 4) return v[i] + u * (v[i + 1] - v[i]);
  std::size_t b = i == 0 ? 0 : i - 1;
  if (b + 3 > last) b = last - 3;
  const double x = pos - static_cast<double>(b);
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    double l = 1.0;
    for (std::size_t m = 0; m < 4; ++m) {
      if (m != k) l *= (x - static_cast<double>(m)) / (static_cast<double>(k) - static_cast<double>(m));
    }
    acc += l * v[b + k];
  }
  return acc;
}

}  // namespace detail

/// Solves the renewal system
///   Phi0(t) = S1(t) + int Phi1(t-x) dF1(x)
///   Phi1(t) = S2(t) + int Phi2(t-x) P(Y1 < x) dF2(x)
///   Phi2(t) = S1(t) + int Phi1(t-x) P(Y2 < x) dF1(x)
///   Phi3(t) = S2(t) + int Phi2(t-x) dF2(x)
/// by trapezoidal product integration, and samples the four survival curves
/// on `grid`.
inline VolterraSolution solve_volterra(const GeneralColdConfig& cfg, const std::vector<double>& grid,
                                       const VolterraOptions& opts = {}) {
  if (grid.empty()) throw ValidationError("empty time grid");
  const double horizon = grid.back();
  VolterraSolution sol;
  if (horizon <= 0.0) {
    for (auto& c : sol.phi) c = Curve(grid, std::vector<double>(grid.size(), 1.0));
    return sol;
  }
  const double target = opts.step > 0.0 ? opts.step : 0.01 / cfg.max_rate();
  const double cells_d = std::ceil(horizon / target);
  if (cells_d > 2e5) throw ValidationError("time horizon too long for the Volterra step; use a shorter grid");
  const auto cells = static_cast<std::size_t>(std::max(cells_d, 4.0));
  const double h = horizon / static_cast<double>(cells);
  sol.step = h;
  sol.extrapolated = opts.extrapolate && cfg.F1.has_density() && cfg.F2.has_density();

  auto phi = detail::volterra_march(cfg, h, cells);
  if (sol.extrapolated) {
    const auto fine = detail::volterra_march(cfg, 0.5 * h, 2 * cells);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t n = 0; n <= cells; ++n) phi[k][n] = (4.0 * fine[k][2 * n] - phi[k][n]) / 3.0;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    auto& v = phi[k];
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (v[n] < -opts.monotone_tol || v[n] > 1.0 + opts.monotone_tol ||
          (n > 0 && v[n] > v[n - 1] + opts.monotone_tol)) {
        throw RefineStepError("Volterra solution not monotone at t = " + std::to_string(static_cast<double>(n) * h) +
                                  "; refine the step",
                              0.5 * h);
      }
      v[n] = std::clamp(v[n], 0.0, 1.0);
    }
    std::vector<double> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(std::clamp(detail::uniform_interp(v, h, t, sol.extrapolated), 0.0, 1.0));
    sol.phi[k] = Curve(grid, std::move(values));
  }
  return sol;
}

/// Mean of a survival curve: trapezoid over the grid plus an exponential tail
/// fitted on the last tenth of the grid. An estimate only.
inline double mean_from_survival(const Curve& c) {
  const auto& t = c.grid();
  const auto& v = c.values();
  double acc = t.front() * 0.5 * (1.0 + v.front());
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
  const double t_end = t.back();
  const double t_fit = t_end - 0.1 * (t_end - t.front());
  const double v_fit = c.at(t_fit);
  if (v.back() > 0.0 && v_fit > v.back()) {
    const double rate = std::log(v_fit / v.back()) / (t_end - t_fit);
    acc += v.back() / rate;
  }
  return acc;
}

}  // namespace standbyrel
