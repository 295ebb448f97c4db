#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "standbyrel/dists.hpp"

using namespace standbyrel;

TEST(Distribution, ExponentialBasics) {
  const auto d = Distribution::exponential(2.0);
  EXPECT_DOUBLE_EQ(d.survival(0.0), 1.0);
  EXPECT_NEAR(d.survival(1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(*d.density(0.5), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(d.mean(), 0.5);
  EXPECT_NEAR(d.laplace_survival(3.0), 0.2, 1e-15);
  EXPECT_NEAR(d.laplace_stieltjes(3.0), 0.4, 1e-15);
  EXPECT_TRUE(d.atoms().empty());
}

TEST(Distribution, DeterministicIsRightContinuous) {
  const auto d = Distribution::deterministic(1.5);
  EXPECT_EQ(d.survival(1.4999), 1.0);
  EXPECT_EQ(d.survival(1.5), 0.0);
  EXPECT_EQ(d.cdf_left(1.5), 0.0);
  EXPECT_EQ(d.cdf(1.5), 1.0);
  EXPECT_FALSE(d.density(1.0).has_value());
  ASSERT_EQ(d.atoms().size(), 1u);
  EXPECT_EQ(d.atoms()[0].at, 1.5);
}

TEST(Distribution, ZeroDeterministicHasNoSurvivalAtZero) {
  const auto d = Distribution::deterministic(0.0);
  EXPECT_EQ(d.survival(0.0), 0.0);
  EXPECT_EQ(d.mean(), 0.0);
}

TEST(Distribution, WeibullShapeOneIsExponential) {
  const auto w = Distribution::weibull(1.0, 0.5);
  const auto e = Distribution::exponential(2.0);
  for (double t : {0.0, 0.1, 1.0, 3.0}) {
    EXPECT_NEAR(w.survival(t), e.survival(t), 1e-15);
    EXPECT_NEAR(*w.density(t), *e.density(t), 1e-14);
  }
  EXPECT_NEAR(w.laplace_survival(1.3), e.laplace_survival(1.3), 1e-10);
  EXPECT_NEAR(w.mean(), 0.5, 1e-14);
}

TEST(Distribution, WeibullDensityIntegratesToCdf) {
  const auto w = Distribution::weibull(2.5, 1.7);
  // Simpson on [0, 2]
  const int n = 20000;
  const double h = 2.0 / n;
  double acc = *w.density(0.0) + *w.density(2.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * *w.density(i * h);
  EXPECT_NEAR(acc * h / 3.0, w.cdf(2.0), 1e-10);
}

TEST(Distribution, EmpiricalMatchesSample) {
  const auto d = Distribution::empirical({3.0, 1.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(d.survival(2.0), 0.25);
  EXPECT_DOUBLE_EQ(d.cdf_left(2.0), 0.25);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
  const auto atoms = d.atoms();
  ASSERT_EQ(atoms.size(), 3u);
  EXPECT_DOUBLE_EQ(atoms[1].mass, 0.5);
  EXPECT_NEAR(d.laplace_stieltjes(1.0), (std::exp(-3.0) + std::exp(-1.0) + 2 * std::exp(-2.0)) / 4, 1e-15);
}

TEST(Distribution, PartialMeanIntegratesSurvival) {
  for (const auto& d : {Distribution::exponential(0.7), Distribution::deterministic(1.2),
                        Distribution::weibull(0.8, 2.0), Distribution::empirical({0.5, 1.0, 4.0})}) {
    const double t = 1.5;
    const int n = 30000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += d.survival((i + 0.5) * t / n) * t / n;
    EXPECT_NEAR(d.partial_mean(t), acc, 1e-6) << d.literal();
  }
}

TEST(Distribution, RejectsInvalidParameters) {
  EXPECT_THROW(Distribution::exponential(0.0), ValidationError);
  EXPECT_THROW(Distribution::exponential(-1.0), ValidationError);
  EXPECT_THROW(Distribution::deterministic(-0.1), ValidationError);
  EXPECT_THROW(Distribution::weibull(0.0, 1.0), ValidationError);
  EXPECT_THROW(Distribution::empirical({}), ValidationError);
  EXPECT_THROW(Distribution::empirical({1.0, -2.0}), ValidationError);
  EXPECT_THROW(Distribution::exponential(1.0).survival(-1.0), ValidationError);
}

TEST(Parse, Literals) {
  EXPECT_EQ(parse_distribution("exp:2"), Distribution::exponential(2.0));
  EXPECT_EQ(parse_distribution("det:0.4"), Distribution::deterministic(0.4));
  EXPECT_EQ(parse_distribution("weibull:2,3"), Distribution::weibull(2.0, 3.0));
  EXPECT_THROW(parse_distribution("gamma:1"), ValidationError);
  EXPECT_THROW(parse_distribution("exp:abc"), ValidationError);
  EXPECT_THROW(parse_distribution("exp:-1"), ValidationError);
  EXPECT_THROW(parse_distribution("weibull:2"), ValidationError);
  EXPECT_THROW(parse_distribution("exp"), ValidationError);
}

TEST(Parse, EmpiricalFile) {
  const std::string path = ::testing::TempDir() + "standbyrel_sample.txt";
  {
    std::ofstream f(path);
    f << "1.5\n\n 2.5 \n0.5\n";
  }
  const auto d = parse_distribution("emp:" + path);
  EXPECT_DOUBLE_EQ(d.mean(), 1.5);
  std::remove(path.c_str());
  EXPECT_THROW(parse_distribution("emp:/nonexistent/file"), ValidationError);
}

TEST(Race, ClosedFormsAgreeWithGeneralPath) {
  const auto x = Distribution::exponential(1.3);
  // Weibull(1, 1/0.6) is Exp(0.6) routed through quadrature.
  EXPECT_NEAR(prob_greater(x, Distribution::exponential(0.6)), 0.6 / 1.9, 1e-15);
  EXPECT_NEAR(prob_greater(x, Distribution::weibull(1.0, 1.0 / 0.6)), 0.6 / 1.9, 1e-9);
  EXPECT_NEAR(prob_greater(x, Distribution::deterministic(0.4)), std::exp(-0.52), 1e-15);
  EXPECT_NEAR(prob_greater(Distribution::weibull(1.0, 1.0 / 1.3), Distribution::deterministic(0.4)),
              std::exp(-0.52), 1e-12);
}

TEST(Race, TiesAreNotGreater) {
  const auto d = Distribution::deterministic(1.0);
  EXPECT_EQ(prob_greater(d, d), 0.0);
  EXPECT_EQ(prob_greater(Distribution::deterministic(1.5), d), 1.0);
}

TEST(Race, MonteCarloCrossCheck) {
  const auto x = Distribution::weibull(1.7, 1.2);
  const auto y = Distribution::weibull(0.9, 0.8);
  Rng rng(11);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += x.sample(rng) > y.sample(rng);
  const double p = prob_greater(x, y);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Sampling, ReproducibleAndUnbiased) {
  const auto d = Distribution::exponential(2.0);
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(d.sample(a), d.sample(b));
  Rng rng(9);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += d.sample(rng);
  EXPECT_NEAR(acc / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}
