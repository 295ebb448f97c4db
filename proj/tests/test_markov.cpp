#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "standbyrel/markov.hpp"
#include "standbyrel/quadrature.hpp"

using namespace standbyrel;

namespace {
constexpr auto kFresh = InitialState::FreshPair;
constexpr auto kDegraded = InitialState::DegradedStart;
}  // namespace

TEST(WarmClosedForm, ReferenceValues) {
  // Transient solution of the 2-state generator at t = 1, all rates 1.
  EXPECT_NEAR(warm_survival({1, 1, 1}, kFresh, 1.0), 0.6651433193661932, 1e-14);
  EXPECT_NEAR(cold_survival({1, 1}, kFresh, 1.0), 0.7866455993033681, 1e-14);
  EXPECT_DOUBLE_EQ(warm_survival({1, 1, 1}, kFresh, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(warm_survival({1, 1, 1}, kDegraded, 0.0), 1.0);
}

TEST(WarmClosedForm, NoRepairIsParallelPair) {
  for (double t : {0.0, 0.3, 1.0, 5.0}) {
    EXPECT_NEAR(warm_survival({1, 1, 0}, kFresh, t), 2 * std::exp(-t) - std::exp(-2 * t), 1e-15);
  }
}

TEST(WarmClosedForm, MatchesMatrixExponential) {
  oracle::Rates rates(101);
  for (int i = 0; i < 40; ++i) {
    const WarmConfig cfg{rates(), rates.coin() ? rates() : 0.0, rates()};
    for (auto state : {kFresh, kDegraded}) {
      const int row = state == kFresh ? 0 : 1;
      const double horizon = warm_tail_time(cfg, state, 1e-8);
      for (int k = 0; k <= 50; ++k) {
        const double t = horizon * k / 50.0;
        EXPECT_NEAR(warm_survival(cfg, state, t), oracle::warm_survival(cfg.lambda1, cfg.lambda2, cfg.mu, row, t),
                    1e-10);
        const double f = oracle::warm_density(cfg.lambda1, cfg.lambda2, cfg.mu, row, t);
        EXPECT_NEAR(warm_density(cfg, state, t), f, 1e-9 * (1 + std::abs(f)));
      }
    }
  }
}

TEST(WarmClosedForm, LogDensityFiniteDeepInTail) {
  const WarmConfig cfg{2.0, 1.0, 3.0};
  const double t = 2000.0;
  EXPECT_EQ(warm_density(cfg, kFresh, t), 0.0);
  const double ld = warm_log_density(cfg, kFresh, t);
  EXPECT_TRUE(std::isfinite(ld));
  // Slope of the log density is minus the slow decay rate.
  const double slope = warm_log_density(cfg, kFresh, t + 1.0) - ld;
  EXPECT_NEAR(slope, -(cfg.c() - cfg.a()) / 2.0, 1e-9);
  EXPECT_NEAR(warm_log_density(cfg, kFresh, 1.3), std::log(warm_density(cfg, kFresh, 1.3)), 1e-13);
  EXPECT_NEAR(warm_log_density(cfg, kDegraded, 1.3), std::log(warm_density(cfg, kDegraded, 1.3)), 1e-13);
}

TEST(Hazard, RatioOfDensityAndSurvival) {
  const WarmConfig cfg{0.7, 0.3, 2.2};
  for (auto state : {kFresh, kDegraded}) {
    for (double t : {1e-6, 0.01, 0.5, 2.0, 10.0}) {
      const double expected = warm_density(cfg, state, t) / warm_survival(cfg, state, t);
      EXPECT_NEAR(warm_hazard(cfg, state, t), expected, 1e-12 * (1 + expected));
    }
  }
  EXPECT_EQ(warm_hazard(cfg, kFresh, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(warm_hazard(cfg, kDegraded, 0.0), cfg.lambda1);
}

TEST(Hazard, LimitAtInfinity) {
  // Fresh hazard tends to the slow decay rate (c - a) / 2 = 2 - sqrt 2 for unit rates.
  EXPECT_NEAR(warm_hazard({1, 1, 1}, kFresh, 200.0), 2.0 - std::sqrt(2.0), 1e-12);
}

TEST(Hazard, ZeroDiscriminant) {
  // a = 0 needs lambda2 + mu = 0 and mu = 0: the series pair with a cold spare.
  const WarmConfig cfg{1.5, 0.0, 0.0};
  EXPECT_EQ(cfg.a(), 0.0);
  for (double t : {0.1, 1.0, 4.0}) {
    // Erlang(2, 1.5)
    EXPECT_NEAR(warm_survival(cfg, kFresh, t), std::exp(-1.5 * t) * (1 + 1.5 * t), 1e-14);
    EXPECT_NEAR(warm_hazard(cfg, kFresh, t), 1.5 * 1.5 * t / (1 + 1.5 * t), 1e-14);
  }
}

TEST(Laplace, MatchesQuadratureAndMean) {
  const WarmConfig cfg{1.2, 0.4, 0.9};
  for (auto state : {kFresh, kDegraded}) {
    for (double s : {0.1, 1.0, 7.0}) {
      const double q =
          integrate([&](double t) { return std::exp(-s * t) * warm_survival(cfg, state, t); }, 0.0, 400.0).value;
      EXPECT_NEAR(warm_laplace_survival(cfg, state, s), q, 1e-10);
    }
    const double mean =
        integrate([&](double t) { return warm_survival(cfg, state, t); }, 0.0, warm_tail_time(cfg, state, 1e-16)).value;
    EXPECT_NEAR(warm_mean(cfg, state), mean, 1e-9);
  }
}

TEST(Validation, RejectsBadRates) {
  EXPECT_THROW(WarmConfig::make(0.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(WarmConfig::make(1.0, -1.0, 1.0), ValidationError);
  EXPECT_THROW(WarmConfig::make(1.0, 1.0, NAN), ValidationError);
  EXPECT_THROW(ColdConfig::make(-1.0, 1.0), ValidationError);
  EXPECT_THROW(warm_survival({1, 1, 1}, kFresh, -0.5), ValidationError);
}

TEST(Aging, FreshIsIlrDegradedIsDlr) {
  oracle::Rates rates(7);
  for (int i = 0; i < 20; ++i) {
    const WarmConfig cfg{rates(), rates(), rates()};
    EXPECT_TRUE(aging_class(cfg, kFresh).passed());
    EXPECT_EQ(aging_class(cfg, kFresh).asserted, AgingClass::ILR);
    EXPECT_TRUE(aging_class(cfg, kDegraded).passed());
    EXPECT_EQ(aging_class(cfg, kDegraded).asserted, AgingClass::DLR);
  }
}

TEST(Aging, CertificateCoversThreeShifts) {
  const auto r = aging_class(ColdConfig{1.0, 2.0}, kFresh);
  ASSERT_EQ(r.certificates.size(), 3u);
  EXPECT_DOUBLE_EQ(r.certificates[0].shift, 0.1);
  EXPECT_DOUBLE_EQ(r.certificates[2].shift, 10.0);
}
