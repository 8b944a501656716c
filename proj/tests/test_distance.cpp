#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solgeo/distance_estimator.hpp"

using namespace solgeo;

namespace {

SolPoint random_log_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(std::log(1e-2), std::log(1e2));
  std::uniform_real_distribution<double> z(-10.0, 10.0);
  std::bernoulli_distribution sign(0.5);
  const double x = std::exp(mag(rng)) * (sign(rng) ? 1.0 : -1.0);
  const double y = std::exp(mag(rng)) * (sign(rng) ? 1.0 : -1.0);
  return {x, y, z(rng)};
}

}  // namespace

TEST(SegmentLength, NeverBelowFineQuadrature) {
  const SolParams prm{1.0, 2.0, 0.0};
  const SolPoint a{0.1, -0.4, -0.5}, b{1.2, 0.3, 0.8};
  // Composite Simpson on 20000 panels as the reference.
  const int n = 20000;
  double ref = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double z = a.z + u * (b.z - a.z);
    const double f = std::sqrt((b.x - a.x) * (b.x - a.x) * std::exp(-2.0 * z) +
                               (b.y - a.y) * (b.y - a.y) * std::exp(4.0 * z) +
                               (b.z - a.z) * (b.z - a.z));
    ref += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  ref /= 3.0 * n;
  const double got = segment_length(a, b, prm);
  EXPECT_GE(got, ref - 1e-12);
  EXPECT_NEAR(got, ref, 1e-3 * ref);
}

TEST(EstimateDistance, VerticalIsExact) {
  const SolParams prm{1.0, 1.0, 0.0};
  for (double z : {-7.0, -0.5, 0.0, 2.0, 9.0})
    EXPECT_NEAR(estimate_distance({0, 0, z}, prm), std::fabs(z), 1e-4) << z;
}

TEST(EstimateDistance, PreservesFirstPlane) {
  for (double p : {0.5, 1.0, 2.0}) {
    const SolParams prm{p, 1.3, 0.0};
    for (double x : {-20.0, 0.3, 4.0})
      for (double z : {-3.0, 0.0, 1.5}) {
        const double exact = dist_hp(p, {x, z}, {0, 0});
        const double est = estimate_distance({x, 0, z}, prm);
        EXPECT_GE(est, exact - 1e-9);
        EXPECT_LE(est, exact + 1e-3) << p << " " << x << " " << z;
      }
  }
}

TEST(EstimateDistance, PreservesSecondPlaneBetweenPoints) {
  const SolParams prm{0.8, 1.7, 0.0};
  const SolPoint g1{2.0, -1.0, 0.4}, g2{2.0, 3.5, -1.1};
  const double exact = dist_hp(1.7, proj2(g1), proj2(g2));
  const double est = estimate_distance_between(g1, g2, prm);
  EXPECT_GE(est, exact - 1e-9);
  EXPECT_LE(est, exact + 1e-3);
}

TEST(EstimateDistance, Sandwich) {
  std::mt19937_64 rng(2024);
  for (const SolParams prm : {SolParams{1, 1, 0}, SolParams{0.5, 2, 0}, SolParams{2, 0.7, 0}}) {
    for (int i = 0; i < 300; ++i) {
      const SolPoint g = random_log_uniform(rng);
      const double est = estimate_distance(g, prm);
      const double lo = std::max(lower_bound_i(g), lower_bound_ii(g, prm));
      const double hi = std::min(upper_bound_iii(g, prm), upper_bound_iv(g, prm));
      EXPECT_GE(est, lo) << g.x << " " << g.y << " " << g.z;
      EXPECT_LE(est, hi + 1e-3) << g.x << " " << g.y << " " << g.z;
    }
  }
}

TEST(EstimateDistance, MonotoneInIterations) {
  const SolParams prm{1.0, 1.5, 0.0};
  DistanceEstimator est(prm, 64);
  double prev = est.initialize({3.0, -2.0, 0.7});
  for (int i = 0; i < 10; ++i) {
    const double cur = est.refine(1);
    EXPECT_LE(cur, prev);
    prev = cur;
  }
  EXPECT_EQ(est.curve().points.front(), kOrigin);
  EXPECT_EQ(est.curve().points.back(), (SolPoint{3.0, -2.0, 0.7}));
}

TEST(EstimateDistance, RejectsBadInput) {
  EXPECT_THROW(estimate_distance({1, 1, 1}, {1, 1, 0}, 1, 0), DomainError);
  EXPECT_THROW(estimate_distance({NAN, 1, 1}, {1, 1, 0}), DomainError);
}

TEST(VerticalGeodesic, UnitSpeed) {
  const SolParams prm{1.2, 0.6, 0.0};
  for (double eta : {-3.0, 0.0, 0.5})
    for (auto [s, t] : {std::pair{0.0, 2.0}, {1.0, 4.5}, {3.0, 0.2}}) {
      const double d = estimate_distance_between(vertical_geodesic(eta, Direction::up, s),
                                                 vertical_geodesic(eta, Direction::up, t), prm);
      EXPECT_NEAR(d, std::fabs(t - s), 1e-3);
      const double e = estimate_distance_between(vertical_geodesic(eta, Direction::down, s),
                                                 vertical_geodesic(eta, Direction::down, t), prm);
      EXPECT_NEAR(e, std::fabs(t - s), 1e-3);
    }
}

TEST(DeviationProxy, DominatesEstimate) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const SolParams prm{1.0, 1.0, 1.0};
  for (int i = 0; i < 50; ++i) {
    const SolPoint g{u(rng), u(rng), u(rng)};
    const double y_inf = u(rng);
    const SolPoint moved{std::exp(-g.z) * g.x, std::exp(g.z) * (g.y - y_inf), 0.0};
    EXPECT_GE(deviation_proxy(g, y_inf, prm) + 1e-3, estimate_distance(moved, prm));
  }
}
