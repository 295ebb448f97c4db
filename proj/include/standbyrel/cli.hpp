#pragma once

#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "standbyrel/criteria.hpp"
#include "standbyrel/dists.hpp"
#include "standbyrel/errors.hpp"
#include "standbyrel/general_cold.hpp"
#include "standbyrel/laplace.hpp"
#include "standbyrel/markov.hpp"
#include "standbyrel/orders.hpp"
#include "standbyrel/sim.hpp"

namespace standbyrel::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kConsistency = 3 };

enum class Format { Csv, Json };

/// Shortest round-trip decimal, locale independent.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline nlohmann::json jnum(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

/// Exponential Markov system given positionally: warm l1,l2,mu or cold l,mu.
struct MarkovSystem {
  WarmConfig cfg;
  bool cold = false;
  InitialState state = InitialState::FreshPair;

  LifetimeLaw law() const { return warm_law(cfg, state); }
  ColdConfig as_cold() const { return {cfg.lambda1, cfg.mu}; }
};

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(standbyrel::detail::parse_number(std::string_view(text).substr(pos, comma - pos), text));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected) {
    throw ValidationError(what + " expects " + std::to_string(expected) + " comma-separated values, got '" + text + "'");
  }
  return out;
}

inline MarkovSystem parse_warm(const std::string& text, bool star) {
  const auto v = parse_list(text, 3, "--warm");
  return {WarmConfig::make(v[0], v[1], v[2]), false, star ? InitialState::DegradedStart : InitialState::FreshPair};
}

inline MarkovSystem parse_cold(const std::string& text, bool star) {
  const auto v = parse_list(text, 2, "--cold");
  return {ColdConfig::make(v[0], v[1]).as_warm(), true, star ? InitialState::DegradedStart : InitialState::FreshPair};
}

/// "tmin,tmax,n,log|lin"
inline std::vector<double> parse_grid(const std::string& text) {
  const auto comma = text.rfind(',');
  if (comma == std::string::npos) throw ValidationError("malformed grid '" + text + "'");
  const std::string kind = text.substr(comma + 1);
  const auto v = parse_list(text.substr(0, comma), 3, "--grid");
  const double n = v[2];
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) throw ValidationError("grid point count must be a positive integer, got '" + text + "'");
  if (!(v[0] >= 0.0) || !(v[1] >= v[0]) || (n > 1 && !(v[1] > v[0]))) {
    throw ValidationError("grid bounds must satisfy 0 <= tmin < tmax, got '" + text + "'");
  }
  if (n == 1) return {v[0]};
  if (kind == "lin") return linear_grid(v[0], v[1], static_cast<std::size_t>(n));
  if (kind == "log") {
    if (!(v[0] > 0.0)) throw ValidationError("log grid needs tmin > 0, got '" + text + "'");
    return log_grid(v[0], v[1], static_cast<std::size_t>(n));
  }
  throw ValidationError("grid spacing must be log or lin, got '" + kind + "'");
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ValidationError("format must be csv or json, got '" + s + "'");
}

inline nlohmann::json envelope(const std::string& command) {
  return nlohmann::json{{"schema_version", kSchemaVersion}, {"command", command}};
}

// ---------------------------------------------------------------------------
// Analytic verdicts for a pair of Markov systems

inline CriterionResult analytic_verdict(const MarkovSystem& a, const MarkovSystem& b, OrderRelation rel) {
  if (a.cold != b.cold || a.state != b.state) {
    return detail::sufficient(false, "none", "systems are of different kinds");
  }
  const bool star = a.state == InitialState::DegradedStart;
  CriterionResult lr, hr;
  if (star) {
    lr = detail::sufficient(false, "none", "no likelihood-ratio rule for systems starting degraded");
    hr = a.cold ? cold_star_hr_sufficient(a.as_cold(), b.as_cold()) : warm_star_hr_sufficient(a.cfg, b.cfg);
  } else if (a.cold) {
    lr = cold_lr_iff(a.as_cold(), b.as_cold());
    hr = a.cfg.lambda1 == b.cfg.lambda1 ? cold_hr_iff_equal_lifetimes(a.as_cold(), b.as_cold())
                                        : cold_hr_sufficient(a.as_cold(), b.as_cold());
  } else {
    lr = warm_lr_iff(a.cfg, b.cfg);
    const bool shared = a.cfg.lambda1 == b.cfg.lambda1 && a.cfg.lambda2 == b.cfg.lambda2;
    hr = shared ? warm_hr_iff_equal_lifetimes(a.cfg, b.cfg) : warm_hr_sufficient(a.cfg, b.cfg);
  }
  if (!hr.holds() && lr.holds()) {
    hr = detail::sufficient(true, "implied_by_" + lr.rule);
  }
  if (lr.verdict == Verdict::NotApplicable && hr.verdict == Verdict::DoesNotHold) {
    lr = hr;
    lr.rule = "refuted_by_" + hr.rule;
  }
  switch (rel) {
    case OrderRelation::lr: return lr;
    case OrderRelation::hr: return hr;
    default:
      if (hr.holds()) return detail::sufficient(true, "implied_by_" + hr.rule);
      return detail::sufficient(false, "none", "no analytic rule for this relation");
  }
}

// ---------------------------------------------------------------------------

struct Options {
  std::vector<std::string> warm;
  std::vector<std::string> cold;
  bool star = false;
  std::string x1, x2, y1, y2;
  std::string start = "tau0";
  std::string rel = "all";
  std::string grid;
  std::optional<double> t;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::size_t shards = 1;
  std::string policy = "redraw";
  std::string format = "csv";
  std::string method;
  bool analytic = false;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  int eval();
  int compare();
  int mttf_cmd();
  int allocate();
  int simulate_cmd();
  int aging();
  int audit();

 private:
  Format format() const { return parse_format(o_.format); }

  std::vector<MarkovSystem> markov_systems() const {
    if (!o_.warm.empty() && !o_.cold.empty()) throw ValidationError("use either --warm or --cold, not both");
    std::vector<MarkovSystem> out;
    for (const auto& w : o_.warm) out.push_back(parse_warm(w, o_.star));
    for (const auto& c : o_.cold) out.push_back(parse_cold(c, o_.star));
    return out;
  }

  bool has_general() const { return !o_.x1.empty() || !o_.x2.empty() || !o_.y1.empty() || !o_.y2.empty(); }

  GeneralColdConfig general() const {
    for (const auto* s : {&o_.x1, &o_.x2, &o_.y1, &o_.y2}) {
      if (s->empty()) throw ValidationError("--x1, --x2, --y1 and --y2 are all required");
    }
    GeneralColdConfig cfg{parse_distribution(o_.x1), parse_distribution(o_.x2), parse_distribution(o_.y1),
                          parse_distribution(o_.y2), parse_start(o_.start)};
    for (const auto* g : {&cfg.G1, &cfg.G2}) {
      if (const auto* d = std::get_if<Deterministic>(&g->kind()); d && d->value == 0.0) {
        err_ << "warning: zero repair time; a failed unit is ready again instantly\n";
      }
    }
    return cfg;
  }

  std::vector<double> time_grid(double default_max) const {
    if (o_.t) {
      if (!(*o_.t >= 0.0)) throw ValidationError("--t must be nonnegative");
      return {*o_.t};
    }
    if (!o_.grid.empty()) return parse_grid(o_.grid);
    return linear_grid(0.0, default_max, 101);
  }

  void emit_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                  const nlohmann::json& json) {
    if (format() == Format::Json) {
      out_ << json.dump() << '\n';
      return;
    }
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? "," : "") << r[i];
      out_ << '\n';
    }
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

inline int Runner::eval() {
  const auto systems = markov_systems();
  std::vector<double> ts, phi, f, r;
  std::string method = o_.method;
  if (!systems.empty()) {
    if (systems.size() != 1 || has_general()) throw ValidationError("eval takes exactly one system");
    if (!method.empty() && method != "closed") throw ValidationError("Markov systems use --method closed");
    method = "closed";
    const auto& s = systems[0];
    ts = time_grid(warm_tail_time(s.cfg, s.state, 1e-6));
    for (double t : ts) {
      phi.push_back(warm_survival(s.cfg, s.state, t));
      f.push_back(warm_density(s.cfg, s.state, t));
      r.push_back(warm_hazard(s.cfg, s.state, t));
    }
  } else {
    const auto cfg = general();
    if (method.empty()) method = cfg.all_exponential() ? "laplace" : "volterra";
    const double horizon = 20.0 * mttf(cfg)[cfg.start];
    ts = time_grid(horizon);
    if (method == "laplace") {
      if (cfg.all_exponential()) {
        const auto lt = laplace_phi(cfg);
        const auto dens = lt.density_transform();
        for (double t : ts) {
          phi.push_back(std::clamp(lt.invert(t), 0.0, 1.0));
          f.push_back(dens.invert(t));
        }
      } else {
        const auto idx = static_cast<std::size_t>(cfg.start);
        for (double t : ts) {
          phi.push_back(invert_laplace([&](double s) { return laplace_phi_numeric(cfg, s)[idx]; }, t));
          f.push_back(NAN);
        }
      }
    } else if (method == "volterra") {
      std::vector<double> solve_grid = ts;
      if (ts.size() == 1 && ts[0] > 0.0) solve_grid = {0.5 * ts[0], ts[0]};
      const auto sol = solve_volterra(cfg, solve_grid);
      const auto& c = sol[cfg.start];
      const auto& g = c.grid();
      const auto& v = c.values();
      const std::size_t offset = g.size() - ts.size();
      for (std::size_t i = offset; i < g.size(); ++i) {
        phi.push_back(v[i]);
        if (g.size() < 2) {
          f.push_back(NAN);
          continue;
        }
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 < g.size() ? i + 1 : i;
        f.push_back(-(v[hi] - v[lo]) / (g[hi] - g[lo]));
      }
    } else {
      throw ValidationError("--method must be volterra or laplace for general systems, got '" + method + "'");
    }
    for (std::size_t i = 0; i < ts.size(); ++i) r.push_back(phi[i] > 0.0 ? f[i] / phi[i] : NAN);
  }
  std::vector<std::vector<std::string>> rows;
  auto j = envelope("eval");
  j["method"] = method;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    rows.push_back({fmt(ts[i]), fmt(phi[i]), fmt(f[i]), fmt(r[i])});
    j["t"].push_back(ts[i]);
    j["phi"].push_back(jnum(phi[i]));
    j["f"].push_back(jnum(f[i]));
    j["r"].push_back(jnum(r[i]));
  }
  emit_table({"t", "phi", "f", "r"}, rows, j);
  return kOk;
}

inline int Runner::compare() {
  const auto systems = markov_systems();
  if (systems.size() != 2) throw ValidationError("compare needs two systems (--warm A --warm B or --cold A --cold B)");
  std::vector<OrderRelation> rels;
  if (o_.rel == "all") rels.assign(kAllRelations.begin(), kAllRelations.end());
  else rels.push_back(parse_relation(o_.rel));
  const auto la = systems[0].law();
  const auto lb = systems[1].law();
  std::vector<std::vector<std::string>> rows;
  auto j = envelope("compare");
  for (auto rel : rels) {
    const auto an = analytic_verdict(systems[0], systems[1], rel);
    std::string numeric = "skipped", agree = "na";
    nlohmann::json jrow{{"relation", to_string(rel)}, {"analytic", to_string(an.verdict)}, {"rule", an.rule}};
    if (!o_.analytic) {
      const auto nv = check_order(la, lb, rel);
      numeric = to_string(nv.status);
      if (an.verdict != Verdict::NotApplicable && nv.conclusive()) {
        agree = (an.holds() == nv.holds()) ? "true" : "false";
      }
      jrow["numeric"] = numeric;
      jrow["witness"] = nv.fails() ? jnum(nv.witness) : nlohmann::json(nullptr);
      jrow["agree"] = agree == "na" ? nlohmann::json(nullptr) : nlohmann::json(agree == "true");
    }
    rows.push_back({to_string(rel), to_string(an.verdict), an.rule, numeric, agree});
    j["verdicts"].push_back(jrow);
  }
  emit_table({"relation", "analytic", "rule", "numeric", "agree"}, rows, j);
  return kOk;
}

inline int Runner::mttf_cmd() {
  const auto cfg = general();
  const auto m = mttf(cfg);
  std::vector<std::vector<std::string>> rows;
  auto j = envelope("mttf");
  for (int k = 0; k < 4; ++k) {
    const auto s = static_cast<StartState>(k);
    rows.push_back({to_string(s), fmt(m[s])});
    j["mean"][to_string(s)] = m[s];
  }
  j["p_x2_gt_y1"] = m.p21;
  j["p_x1_gt_y2"] = m.p12;
  emit_table({"start", "mean"}, rows, j);
  return kOk;
}

inline int Runner::allocate() {
  const auto cfg = general();
  const auto a = allocation_compare(cfg);
  const std::string exp_det = a.exp_det_rule ? (*a.exp_det_rule ? "true" : "false") : "na";
  auto j = envelope("allocate");
  j["preferred"] = to_string(a.preferred);
  j["mean_tau0"] = a.means[StartState::Tau0];
  j["mean_tau3"] = a.means[StartState::Tau3];
  j["margin"] = a.margin;
  j["general_rule"] = a.general_rule;
  j["exp_det_rule"] = a.exp_det_rule ? nlohmann::json(*a.exp_det_rule) : nlohmann::json(nullptr);
  j["rule_fired"] = a.rule_fired;
  emit_table({"preferred", "mean_tau0", "mean_tau3", "margin", "general_rule", "exp_det_rule", "rule_fired"},
             {{to_string(a.preferred), fmt(a.means[StartState::Tau0]), fmt(a.means[StartState::Tau3]), fmt(a.margin),
               a.general_rule ? "true" : "false", exp_det, a.rule_fired}},
             j);
  return kOk;
}

inline int Runner::simulate_cmd() {
  const auto systems = markov_systems();
  std::optional<SystemSpec> spec;
  double reference_mean;
  if (!systems.empty()) {
    if (systems.size() != 1 || has_general()) throw ValidationError("simulate takes exactly one system");
    const auto& s = systems[0];
    WarmPolicy policy;
    if (o_.policy == "redraw") policy = WarmPolicy::RedrawOnPromotion;
    else if (o_.policy == "exposure") policy = WarmPolicy::CumulativeExposure;
    else throw ValidationError("--policy must be redraw or exposure, got '" + o_.policy + "'");
    spec = s.cold ? PositionalSpec::cold(s.as_cold(), s.state) : PositionalSpec::warm(s.cfg, s.state, policy);
    reference_mean = warm_mean(s.cfg, s.state);
  } else {
    const auto cfg = general();
    spec = cfg;
    reference_mean = mttf(cfg)[cfg.start];
  }
  const auto result = simulate_sharded(*spec, o_.n, o_.seed, o_.shards);
  const auto grid = time_grid(10.0 * reference_mean);
  const auto curve = result.empirical_survival(grid);
  if (format() == Format::Json) {
    auto j = envelope("simulate");
    j["n"] = result.n();
    j["seed"] = o_.seed;
    j["shards"] = o_.shards;
    j["mean"] = result.mean();
    j["std_error"] = result.std_error();
    j["survival"] = {{"t", curve.grid()}, {"value", curve.values()}};
    out_ << j.dump() << '\n';
    return kOk;
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < curve.size(); ++i) rows.push_back({fmt(curve.grid()[i]), fmt(curve.values()[i])});
  emit_table({"t", "value"}, rows, {});
  return kOk;
}

namespace internal {

struct AgingOutcome {
  AgingReport report;
  std::optional<std::string> failure;
};

inline AgingOutcome run_aging(const MarkovSystem& s) {
  try {
    return {aging_class(s.cfg, s.state), std::nullopt};
  } catch (const ConsistencyError& e) {
    return {{s.state == InitialState::FreshPair ? AgingClass::ILR : AgingClass::DLR, {}}, e.what()};
  }
}

}  // namespace internal

inline int Runner::aging() {
  const auto systems = markov_systems();
  if (systems.empty()) throw ValidationError("aging needs --warm or --cold");
  std::vector<std::vector<std::string>> rows;
  auto j = envelope("aging");
  bool ok = true;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto outcome = internal::run_aging(systems[i]);
    if (outcome.failure) {
      ok = false;
      err_ << "error: " << *outcome.failure << '\n';
    }
    for (const auto& c : outcome.report.certificates) {
      rows.push_back({std::to_string(i + 1), to_string(outcome.report.asserted), fmt(c.shift), c.passed ? "true" : "false",
                      fmt(c.worst_violation), fmt(c.witness)});
      j["certificates"].push_back({{"system", i + 1}, {"class", to_string(outcome.report.asserted)}, {"shift", c.shift},
                                   {"passed", c.passed}, {"worst_violation", c.worst_violation}, {"witness", c.witness}});
    }
    j["passed"].push_back(!outcome.failure.has_value());
  }
  emit_table({"system", "class", "shift", "passed", "worst_violation", "witness"}, rows, j);
  return ok ? kOk : kConsistency;
}

inline int Runner::audit() {
  const auto systems = markov_systems();
  if (systems.size() != 2) throw ValidationError("audit needs two systems");
  bool ok = true;
  AuditReport report;
  try {
    report = implication_audit(systems[0].law(), systems[1].law());
  } catch (const ChainViolationError& e) {
    report = e.report();
    ok = false;
    err_ << "error: " << e.what() << '\n';
  }
  for (const auto& s : systems) {
    const auto outcome = internal::run_aging(s);
    if (outcome.failure) {
      ok = false;
      err_ << "error: " << *outcome.failure << '\n';
    }
  }
  std::vector<std::vector<std::string>> rows;
  auto j = envelope("audit");
  for (auto rel : kAllRelations) {
    const auto& v = report[rel];
    rows.push_back({to_string(rel), to_string(v.status), v.fails() ? fmt(v.witness) : ""});
    j["verdicts"].push_back({{"relation", to_string(rel)}, {"status", to_string(v.status)},
                             {"witness", v.fails() ? jnum(v.witness) : nlohmann::json(nullptr)}});
  }
  j["ok"] = ok;
  emit_table({"relation", "status", "witness"}, rows, j);
  return ok ? kOk : kConsistency;
}

inline constexpr const char* kDescription =
    "Reliability of two-unit standby systems with repair.\n"
    "Markov systems: --warm L1,L2,MU (principal failure, standby failure, repair rate)\n"
    "                --cold L,MU     (failure rate, repair rate); --star starts with a unit in repair.\n"
    "General cold systems: --x1 --x2 lifetimes, --y1 --y2 repair times of units 1 and 2, each\n"
    "  exp:RATE | det:T | weibull:SHAPE,SCALE | emp:PATH; --start tau0|tau1|tau2|tau3.\n"
    "Exit status: 0 success, 2 invalid input, 3 consistency violation, 1 numerical failure.";

/// Parses `args` (without the program name) and runs the subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{kDescription, "standbyrel"};
  app.require_subcommand(1);
  Options o;

  const auto add_markov = [&o](CLI::App* sub) {
    sub->add_option("--warm", o.warm, "warm system L1,L2,MU")->take_all();
    sub->add_option("--cold", o.cold, "cold system L,MU")->take_all();
    sub->add_flag("--star", o.star, "start with one unit under repair");
  };
  const auto add_general = [&o](CLI::App* sub) {
    sub->add_option("--x1", o.x1, "lifetime of unit 1");
    sub->add_option("--x2", o.x2, "lifetime of unit 2");
    sub->add_option("--y1", o.y1, "repair time of unit 1");
    sub->add_option("--y2", o.y2, "repair time of unit 2");
    sub->add_option("--start", o.start, "tau0|tau1|tau2|tau3");
  };
  const auto add_format = [&o](CLI::App* sub) { sub->add_option("--format", o.format, "csv|json"); };
  const auto add_grid = [&o](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "TMIN,TMAX,N,log|lin");
    sub->add_option("--t", o.t, "single time point");
  };

  auto* eval = app.add_subcommand("eval", "survival, density and hazard curves");
  add_markov(eval);
  add_general(eval);
  add_format(eval);
  add_grid(eval);
  eval->add_option("--method", o.method, "closed|volterra|laplace");

  auto* compare = app.add_subcommand("compare", "stochastic order verdicts for two systems");
  add_markov(compare);
  add_format(compare);
  compare->add_option("--rel", o.rel, "lt|icv|st|hr|lr|all");
  compare->add_flag("--analytic", o.analytic, "analytic criteria only");

  auto* mttf_sub = app.add_subcommand("mttf", "mean lifetimes of a general cold system");
  add_general(mttf_sub);
  add_format(mttf_sub);

  auto* allocate = app.add_subcommand("allocate", "which unit should start working");
  add_general(allocate);
  add_format(allocate);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo failure times");
  add_markov(simulate);
  add_general(simulate);
  add_format(simulate);
  add_grid(simulate);
  simulate->add_option("--n", o.n, "replications");
  simulate->add_option("--seed", o.seed, "generator seed");
  simulate->add_option("--shards", o.shards, "independent sub-streams");
  simulate->add_option("--policy", o.policy, "redraw|exposure (warm standby clock)");

  auto* aging = app.add_subcommand("aging", "ILR/DLR certificates");
  add_markov(aging);
  add_format(aging);

  auto* audit = app.add_subcommand("audit", "implication-chain and aging audit for two systems");
  add_markov(audit);
  add_format(audit);

  std::vector<const char*> argv{"standbyrel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  Runner runner(o, out, err);
  try {
    if (eval->parsed()) return runner.eval();
    if (compare->parsed()) return runner.compare();
    if (mttf_sub->parsed()) return runner.mttf_cmd();
    if (allocate->parsed()) return runner.allocate();
    if (simulate->parsed()) return runner.simulate_cmd();
    if (aging->parsed()) return runner.aging();
    if (audit->parsed()) return runner.audit();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const UnsupportedRelationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const DivergentMttfError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << '\n';
    return kConsistency;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kValidation;
}

}  // namespace standbyrel::cli
