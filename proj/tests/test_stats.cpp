#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "solgeo/rng.hpp"
#include "solgeo/stats.hpp"

using namespace solgeo;

namespace {

SampleSet sample(std::vector<double> v) { return {"s", std::move(v), 0.0}; }

}  // namespace

TEST(Moments, SmallExamples) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_NEAR(stddev(v), std::sqrt(32.0 / 7.0), 1e-15);
  EXPECT_NEAR(standard_error(v), std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-15);
  // deviations (-1, -1, 2): m2 = 2, m3 = 2
  EXPECT_NEAR(skewness({0, 0, 3}), 2.0 / std::pow(2.0, 1.5), 1e-15);
  EXPECT_THROW(mean({}), DomainError);
  EXPECT_THROW(stddev({1.0}), DomainError);
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0 / 3.0), 2.0);
  EXPECT_THROW(quantile(v, 1.5), DomainError);
  EXPECT_THROW(quantile({}, 0.5), DomainError);
}

TEST(NormalCdf, ReferenceValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145707, 1e-15);
  EXPECT_GT(normal_cdf(-38.0), 0.0);  // erfc keeps the far tail
}

TEST(KolmogorovSmirnov, OneSampleExact) {
  EXPECT_DOUBLE_EQ(ks_statistic(sample({0.0}), ReferenceLaw{}), 0.5);
  // {-1, 1}: sup is 1/2 - Phi(-1) at the first jump
  EXPECT_NEAR(ks_statistic(sample({1.0, -1.0}), ReferenceLaw{}), 0.5 - 0.15865525393145707, 1e-15);
}

TEST(KolmogorovSmirnov, ShiftedNormalDistance) {
  // sup_x |Phi(x - 1) - Phi(x)| = 2 Phi(1/2) - 1 = 0.38292...
  const double oracle = 2.0 * 0.6914624612740131 - 1.0;
  NormalStream g(7, 0, Channel::reference);
  SampleSet s{"n(1,1)", {}, 0.0};
  for (int i = 0; i < 100000; ++i) s.values.push_back(1.0 + g());
  EXPECT_NEAR(ks_statistic(s, ReferenceLaw{}), oracle, 0.01);
}

TEST(KolmogorovSmirnov, NullDistributionScale) {
  // Under the null, sqrt(n) D_n is below 1.36 with probability 0.95.
  int below = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    NormalStream g(11, rep, Channel::reference);
    SampleSet s{"n", {}, 0.0};
    for (int i = 0; i < 1000; ++i) s.values.push_back(g());
    below += std::sqrt(1000.0) * ks_statistic(s, ReferenceLaw{}) < 1.36;
  }
  EXPECT_GE(below, 180);  // binomial(200, 0.95): mean 190, sd 3.1
  EXPECT_LE(below, 199);
}

TEST(KolmogorovSmirnov, TwoSampleExact) {
  EXPECT_NEAR(ks_statistic(sample({1, 2, 3}), sample({2, 3, 4})), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(ks_statistic(sample({1, 2}), sample({3, 4})), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic(sample({1, 2, 2, 3}), sample({3, 2, 1, 2})), 0.0);
  EXPECT_THROW(ks_statistic(sample({}), sample({1.0})), DomainError);
  EXPECT_THROW(ks_statistic(sample({std::nan("")}), sample({1.0})), DomainError);
}

TEST(KolmogorovSmirnov, FunctionalLawNeedsReferenceSample) {
  const ReferenceLaw law{ReferenceLaw::Kind::scaled_bm_functional, 1.0, 1.0};
  EXPECT_THROW(ks_statistic(sample({0.5}), law), DomainError);
}

TEST(Hill, SmallExample) {
  // Top two of |v| are 8 and 4 above the threshold 2: kappa = 2 / log(4 * 2).
  std::vector<double> v(18, 1.0);
  v.insert(v.end(), {2.0, -4.0, 8.0});
  const auto est = tail_exponent(v, 2);
  EXPECT_NEAR(est.kappa_hat, 2.0 / (3.0 * std::log(2.0)), 1e-14);
  EXPECT_EQ(est.k, 2u);
  EXPECT_NEAR(est.ci_low, est.kappa_hat * (1.0 - 1.96 / std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(est.ci_high, est.kappa_hat * (1.0 + 1.96 / std::sqrt(2.0)), 1e-14);
  EXPECT_THROW(tail_exponent(v, 3), DomainError);  // k > N/10
  EXPECT_THROW(tail_exponent(v, 0), DomainError);
}

TEST(Hill, ParetoTail) {
  // P(X > x) = x^{-2}: the estimator is unbiased-ish with sd kappa/sqrt(k).
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) v.push_back(std::pow(1.0 - u(rng), -0.5));
  const auto est = tail_exponent(v, 2000);
  EXPECT_NEAR(est.kappa_hat, 2.0, 4.0 * 2.0 / std::sqrt(2000.0));
}

TEST(Hill, IntervalCoverage) {
  // The 95% interval should cover kappa = 2 in about 95 of 100 replicates.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v;
    for (int i = 0; i < 10000; ++i) v.push_back(std::pow(1.0 - u(rng), -0.5));
    const auto est = tail_exponent(v, 500);
    covered += est.ci_low < 2.0 && 2.0 < est.ci_high;
  }
  EXPECT_GE(covered, 87);  // binomial(100, 0.95): mean 95, sd 2.2
}

TEST(TestReport, PassRule) {
  EXPECT_TRUE(make_report("x", 0.5, 0.5, 10, 1).pass);
  EXPECT_FALSE(make_report("x", 0.51, 0.5, 10, 1).pass);
  EXPECT_FALSE(make_report("x", std::nan(""), 0.5, 10, 1).pass);
  const auto r = make_report("ks", 0.01, 0.06, 5000, 42);
  EXPECT_EQ(r.name, "ks");
  EXPECT_EQ(r.N, 5000u);
  EXPECT_EQ(r.seed, 42u);
}
