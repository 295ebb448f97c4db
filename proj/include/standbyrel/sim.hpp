#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "standbyrel/curve.hpp"
#include "standbyrel/dists.hpp"
#include "standbyrel/errors.hpp"
#include "standbyrel/general_cold.hpp"
#include "standbyrel/markov.hpp"
#include "standbyrel/rng.hpp"

namespace standbyrel {

/// How a warm spare's standby lifetime relates to its working lifetime.
enum class WarmPolicy {
  /// A unit's clock is redrawn from the law of the position it moves into.
  RedrawOnPromotion,
  /// Each unit carries a unit-exponential hazard budget consumed at the rate
  /// of its current position. Exponential laws only.
  CumulativeExposure,
};

/// Laws attached to positions rather than units. `standby` is empty for a
/// cold system.
struct PositionalSpec {
  Distribution principal;
  std::optional<Distribution> standby;
  Distribution repair;
  InitialState initial = InitialState::FreshPair;
  WarmPolicy policy = WarmPolicy::RedrawOnPromotion;

  static PositionalSpec warm(const WarmConfig& cfg, InitialState s, WarmPolicy p = WarmPolicy::RedrawOnPromotion) {
    if (!(cfg.mu > 0.0)) throw ValidationError("simulation needs a positive repair rate");
    std::optional<Distribution> standby;
    if (cfg.lambda2 > 0.0) standby = Distribution::exponential(cfg.lambda2);
    return {Distribution::exponential(cfg.lambda1), standby, Distribution::exponential(cfg.mu), s, p};
  }

  static PositionalSpec cold(const ColdConfig& cfg, InitialState s) {
    if (!(cfg.mu > 0.0)) throw ValidationError("simulation needs a positive repair rate");
    return {Distribution::exponential(cfg.lambda), std::nullopt, Distribution::exponential(cfg.mu), s,
            WarmPolicy::RedrawOnPromotion};
  }
};

/// Positional (Markovian sections) or per-unit (general cold) semantics.
using SystemSpec = std::variant<PositionalSpec, GeneralColdConfig>;

/// Sorted failure times of n replications.
class SimResult {
 public:
  SimResult() = default;
  explicit SimResult(std::vector<double> times) : times_(std::move(times)) {
    std::sort(times_.begin(), times_.end());
  }

  std::size_t n() const noexcept { return times_.size(); }
  const std::vector<double>& sorted_times() const noexcept { return times_; }

  double mean() const {
    double acc = 0.0;
    for (double t : times_) acc += t;
    return times_.empty() ? 0.0 : acc / static_cast<double>(times_.size());
  }

  /// Sample standard deviation over sqrt(n).
  double std_error() const {
    if (times_.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double t : times_) ss += (t - m) * (t - m);
    const double n = static_cast<double>(times_.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }

  /// Fraction of replications with failure time > t.
  double survival(double t) const {
    const auto above = times_.end() - std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<double>(above) / static_cast<double>(times_.size());
  }

  Curve empirical_survival(std::span<const double> grid) const {
    return Curve::sample(grid, [this](double t) { return survival(t); });
  }

  /// Pools two results; associative and commutative.
  friend SimResult merge(const SimResult& a, const SimResult& b) {
    SimResult out;
    out.times_.resize(a.times_.size() + b.times_.size());
    std::merge(a.times_.begin(), a.times_.end(), b.times_.begin(), b.times_.end(), out.times_.begin());
    return out;
  }

 private:
  std::vector<double> times_;
};

namespace detail {

constexpr std::size_t kMaxEventsPerReplication = 10'000'000;

inline double draw(const Distribution& d, Rng& rng) {
  const double x = d.sample(rng);
  if (!std::isfinite(x) || x < 0.0) throw SimulationError("non-finite or negative draw from " + d.literal());
  return x;
}

inline double run_positional_redraw(const PositionalSpec& s, Rng& rng) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double now = 0.0;
  double principal_left = draw(s.principal, rng);
  bool spare_in_repair = s.initial == InitialState::DegradedStart;
  double spare_left = spare_in_repair ? draw(s.repair, rng) : (s.standby ? draw(*s.standby, rng) : inf);
  for (std::size_t ev = 0; ev < kMaxEventsPerReplication; ++ev) {
    if (spare_in_repair) {
      // Ties go to the failure.
      if (principal_left <= spare_left) return now + principal_left;
      now += spare_left;
      principal_left -= spare_left;
      spare_in_repair = false;
      spare_left = s.standby ? draw(*s.standby, rng) : inf;
    } else if (spare_left < principal_left) {
      now += spare_left;
      principal_left -= spare_left;
      spare_in_repair = true;
      spare_left = draw(s.repair, rng);
    } else {
      now += principal_left;
      principal_left = draw(s.principal, rng);
      spare_in_repair = true;
      spare_left = draw(s.repair, rng);
    }
  }
  throw SimulationError("replication exceeded the event limit");
}

inline double run_positional_exposure(const PositionalSpec& s, Rng& rng) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double l1 = std::get<Exponential>(s.principal.kind()).rate;
  const double l2 = s.standby ? std::get<Exponential>(s.standby->kind()).rate : 0.0;
  const auto budget = [&rng] { return -std::log(rng.uniform()); };
  double now = 0.0;
  double principal_budget = budget();
  bool spare_in_repair = s.initial == InitialState::DegradedStart;
  double spare_budget = spare_in_repair ? 0.0 : budget();
  double repair_left = spare_in_repair ? draw(s.repair, rng) : inf;
  for (std::size_t ev = 0; ev < kMaxEventsPerReplication; ++ev) {
    const double to_principal = principal_budget / l1;
    if (spare_in_repair) {
      if (to_principal <= repair_left) return now + to_principal;
      now += repair_left;
      principal_budget -= l1 * repair_left;
      spare_in_repair = false;
      spare_budget = budget();
      repair_left = inf;
      continue;
    }
    const double to_spare = l2 > 0.0 ? spare_budget / l2 : inf;
    if (to_spare < to_principal) {
      now += to_spare;
      principal_budget -= l1 * to_spare;
      spare_in_repair = true;
      repair_left = draw(s.repair, rng);
    } else {
      // The spare keeps its remaining budget when promoted.
      now += to_principal;
      principal_budget = spare_budget - l2 * to_principal;
      spare_in_repair = true;
      repair_left = draw(s.repair, rng);
    }
  }
  throw SimulationError("replication exceeded the event limit");
}

inline double run_per_unit(const GeneralColdConfig& c, Rng& rng) {
  const Distribution* life[2] = {&c.F1, &c.F2};
  const Distribution* repair[2] = {&c.G1, &c.G2};
  int working = 0;
  double ready_at[2] = {0.0, 0.0};
  switch (c.start) {
    case StartState::Tau0: working = 0; break;
    case StartState::Tau1: working = 1; ready_at[0] = draw(c.G1, rng); break;
    case StartState::Tau2: working = 0; ready_at[1] = draw(c.G2, rng); break;
    case StartState::Tau3: working = 1; break;
  }
  double now = 0.0;
  for (std::size_t ev = 0; ev < kMaxEventsPerReplication; ++ev) {
    const double fail = now + draw(*life[working], rng);
    const int other = 1 - working;
    // The other unit must be ready strictly before the failure.
    if (!(ready_at[other] < fail)) return fail;
    now = fail;
    ready_at[working] = now + draw(*repair[working], rng);
    working = other;
  }
  throw SimulationError("replication exceeded the event limit");
}

inline void validate(const SystemSpec& spec) {
  if (const auto* p = std::get_if<PositionalSpec>(&spec)) {
    if (p->policy == WarmPolicy::CumulativeExposure &&
        (!p->principal.is_exponential() || (p->standby && !p->standby->is_exponential()))) {
      throw ValidationError("cumulative-exposure policy needs exponential lifetimes");
    }
  }
}

inline double run_one(const SystemSpec& spec, Rng& rng) {
  if (const auto* p = std::get_if<PositionalSpec>(&spec)) {
    return p->policy == WarmPolicy::CumulativeExposure ? run_positional_exposure(*p, rng)
                                                       : run_positional_redraw(*p, rng);
  }
  return run_per_unit(std::get<GeneralColdConfig>(spec), rng);
}

}  // namespace detail

/// n independent replications from one generator seeded with `seed`.
inline SimResult simulate(const SystemSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("replication count must be at least 1");
  detail::validate(spec);
  Rng rng(seed);
  std::vector<double> times;
  times.reserve(n);
  for (std::size_t i = 0; i < n; ++i) times.push_back(detail::run_one(spec, rng));
  return SimResult(std::move(times));
}

/// Worker threads: STANDBYREL_THREADS if set and positive, else the hardware count.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("STANDBYREL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits n over `shards` sub-streams seeded by derive_seed(seed, i) and
/// merges. The result depends on `shards` but not on the thread count.
inline SimResult simulate_sharded(const SystemSpec& spec, std::size_t n, std::uint64_t seed, std::size_t shards) {
  if (shards == 0) throw ValidationError("shard count must be at least 1");
  if (n < shards) shards = n;
  detail::validate(spec);
  std::vector<SimResult> parts(shards);
  std::vector<std::exception_ptr> errors(shards);
  const auto work = [&](std::size_t i) {
    try {
      const std::size_t count = n / shards + (i < n % shards ? 1 : 0);
      parts[i] = simulate(spec, count, derive_seed(seed, i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min<std::size_t>(thread_budget(), shards);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < shards; i += threads) work(i);
    });
  }
  for (std::size_t i = 0; i < shards; i += threads) work(i);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  SimResult out = std::move(parts[0]);
  for (std::size_t i = 1; i < shards; ++i) out = merge(out, parts[i]);
  return out;
}

/// Largest |empirical - reference| survival over the reference grid.
inline double ks_distance(const SimResult& result, const Curve& reference) {
  double worst = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    worst = std::max(worst, std::abs(result.survival(reference.grid()[i]) - reference.values()[i]));
  }
  return worst;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(const SimResult& a, const SimResult& b) {
  const auto& x = a.sorted_times();
  const auto& y = b.sorted_times();
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                                     static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return worst;
}

/// Critical value of the one-sample KS statistic at level 0.01.
inline double ks_band_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

}  // namespace standbyrel
