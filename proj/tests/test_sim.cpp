#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "standbyrel/sim.hpp"

using namespace standbyrel;

TEST(Simulate, SeedDeterminism) {
  const SystemSpec spec = PositionalSpec::warm({1, 0.5, 2}, InitialState::FreshPair);
  const auto a = simulate(spec, 1000, 42), b = simulate(spec, 1000, 42), c = simulate(spec, 1000, 43);
  EXPECT_EQ(a.sorted_times(), b.sorted_times());
  EXPECT_NE(a.sorted_times(), c.sorted_times());
}

TEST(Simulate, ShardsIndependentOfThreadCount) {
  const SystemSpec spec = PositionalSpec::cold({1, 2}, InitialState::FreshPair);
  setenv("STANDBYREL_THREADS", "1", 1);
  const auto one = simulate_sharded(spec, 10001, 7, 4);
  setenv("STANDBYREL_THREADS", "3", 1);
  const auto three = simulate_sharded(spec, 10001, 7, 4);
  unsetenv("STANDBYREL_THREADS");
  EXPECT_EQ(one.n(), 10001u);
  EXPECT_EQ(one.sorted_times(), three.sorted_times());
}

TEST(Simulate, MergeIsSortedUnion) {
  const SimResult a({3.0, 1.0}), b({2.0});
  const auto m = merge(a, b);
  EXPECT_EQ(m.sorted_times(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(m.survival(2.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.mean(), 2.0);
}

TEST(Simulate, MatchesChainOracle) {
  const WarmConfig cfg{1.3, 0.6, 2.5};
  for (auto state : {InitialState::FreshPair, InitialState::DegradedStart}) {
    const auto r = simulate(PositionalSpec::warm(cfg, state), 20000, 99);
    const int row = state == InitialState::FreshPair ? 0 : 1;
    const auto ref = Curve::sample(linear_grid(0.05, 6.0, 120),
                                   [&](double t) { return oracle::warm_survival(cfg.lambda1, cfg.lambda2, cfg.mu, row, t); });
    EXPECT_LT(ks_distance(r, ref), ks_band_1pct(r.n()));
  }
}

TEST(Simulate, ExposurePolicyAgreesForExponentialLaws) {
  // Memorylessness: both warm-clock policies give the same lifetime law.
  const WarmConfig cfg{0.8, 0.9, 1.1};
  const auto a = simulate(PositionalSpec::warm(cfg, InitialState::FreshPair, WarmPolicy::RedrawOnPromotion), 20000, 5);
  const auto b = simulate(PositionalSpec::warm(cfg, InitialState::FreshPair, WarmPolicy::CumulativeExposure), 20000, 6);
  // Two-sample 1% critical value 1.63 sqrt(2/n).
  EXPECT_LT(ks_two_sample(a, b), 1.63 * std::sqrt(2.0 / 20000.0));
}

TEST(Simulate, GeneralColdDeterministicRepairMean) {
  const GeneralColdConfig cfg{Distribution::exponential(1.0), Distribution::exponential(2.0),
                              Distribution::deterministic(0.4), Distribution::deterministic(1.0)};
  const auto r = simulate(cfg, 100000, 3);
  EXPECT_NEAR(r.mean(), mttf(cfg)[StartState::Tau0], 3.5 * r.std_error());
}

TEST(Simulate, PerUnitMatchesPositionalForEqualUnits) {
  const auto general = simulate(GeneralColdConfig::exponential(1, 1, 3, 3), 20000, 8);
  const auto positional = simulate(PositionalSpec::cold({1, 3}, InitialState::FreshPair), 20000, 9);
  EXPECT_LT(ks_two_sample(general, positional), 1.63 * std::sqrt(2.0 / 20000.0));
}

TEST(Simulate, Validation) {
  EXPECT_THROW(simulate(PositionalSpec::cold({1, 1}, InitialState::FreshPair), 0, 1), ValidationError);
  EXPECT_THROW(PositionalSpec::warm({1, 1, 0}, InitialState::FreshPair), ValidationError);
  PositionalSpec bad = PositionalSpec::warm({1, 1, 1}, InitialState::FreshPair, WarmPolicy::CumulativeExposure);
  bad.principal = Distribution::deterministic(1.0);
  EXPECT_THROW(simulate(bad, 10, 1), ValidationError);
}

TEST(Simulate, StandardError) {
  const SimResult r({1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(r.std_error(), std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}
