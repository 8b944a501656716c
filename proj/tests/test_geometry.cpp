#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "solgeo/geometry.hpp"
#include "solgeo/hyperbolic_arc.hpp"

using namespace solgeo;

namespace {

constexpr double kE = std::numbers::e;

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

void expect_point_near(const SolPoint& a, const SolPoint& b, double tol) {
  EXPECT_LE(rel_diff(a.x, b.x), tol) << a.x << " vs " << b.x;
  EXPECT_LE(rel_diff(a.y, b.y), tol) << a.y << " vs " << b.y;
  EXPECT_LE(rel_diff(a.z, b.z), tol) << a.z << " vs " << b.z;
}

SolPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return {u(rng), u(rng), u(rng)};
}

// Geodesic shooting in the logarithmic model of H(1): with unit speed and
// angle theta to the horizontal, x' = e^z cos(theta), z' = sin(theta) and
// e^{-z} cos(theta) is conserved, which gives theta' = -cos(theta).
struct Shot {
  double x, z, s;
};

Shot shoot(double x0, double z0, double theta0, double x_target) {
  double x = x0, z = z0, th = theta0, s = 0.0;
  const double h = 1e-4;
  auto rhs = [](double zz, double t, double& dx, double& dz, double& dt) {
    dx = std::exp(zz) * std::cos(t);
    dz = std::sin(t);
    dt = -std::cos(t);
  };
  while (true) {
    double k1x, k1z, k1t, k2x, k2z, k2t, k3x, k3z, k3t, k4x, k4z, k4t;
    rhs(z, th, k1x, k1z, k1t);
    rhs(z + 0.5 * h * k1z, th + 0.5 * h * k1t, k2x, k2z, k2t);
    rhs(z + 0.5 * h * k2z, th + 0.5 * h * k2t, k3x, k3z, k3t);
    rhs(z + h * k3z, th + h * k3t, k4x, k4z, k4t);
    const double nx = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    const double nz = z + h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
    const double nt = th + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t);
    if ((x - x_target) * (nx - x_target) <= 0.0) {
      const double w = (x_target - x) / (nx - x);
      return {x_target, z + w * (nz - z), s + w * h};
    }
    x = nx;
    z = nz;
    th = nt;
    s += h;
    if (s > 100.0) return {x, z, s};
  }
}

// Length of the H(1) geodesic from (3,1) to (-2,0.5) found by bisection on
// the initial angle.
double shooting_oracle() {
  // Heading towards decreasing x: theta in (pi/2, pi); larger theta ends lower.
  double lo = std::numbers::pi / 2 + 1e-6;
  double hi = std::numbers::pi - 1e-6;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot(3.0, 1.0, mid, -2.0).z > 0.5 ? lo : hi) = mid;
  }
  return shoot(3.0, 1.0, 0.5 * (lo + hi), -2.0).s;
}

}  // namespace

TEST(GroupLaw, IdentityAndExample) {
  const SolParams prm{1.0, 1.0, 0.0};
  const SolPoint g{0.3, -1.2, 2.5};
  EXPECT_EQ(group_mul(kOrigin, g, prm), g);
  expect_point_near(group_mul({0, 0, 1}, {1, 1, 0}, prm), {kE, 1.0 / kE, 1.0}, 1e-15);
}

TEST(GroupLaw, Associativity) {
  std::mt19937_64 rng(7);
  const SolParams prm{0.7, 1.9, 0.0};
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_point(rng), h = random_point(rng), k = random_point(rng);
    expect_point_near(group_mul(group_mul(g, h, prm), k, prm),
                      group_mul(g, group_mul(h, k, prm), prm), 1e-12);
  }
}

TEST(GroupLaw, Inverse) {
  const SolParams prm{1.0, 1.0, 0.0};
  EXPECT_EQ(group_inv(kOrigin, prm), (SolPoint{-0.0, -0.0, -0.0}));
  expect_point_near(group_inv({1, 1, 1}, prm), {-1.0 / kE, -kE, -1.0}, 1e-15);
  std::mt19937_64 rng(8);
  const SolParams prm2{1.3, 0.4, 0.0};
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_point(rng);
    expect_point_near(group_mul(g, group_inv(g, prm2), prm2), kOrigin, 1e-12);
    expect_point_near(group_mul(group_inv(g, prm2), g, prm2), kOrigin, 1e-12);
  }
}

TEST(GroupLaw, OverflowIsReported) {
  const SolParams prm{1.0, 1.0, 0.0};
  EXPECT_THROW(group_mul({0, 0, 800}, {1, 0, 0}, prm), NonFiniteError);
  EXPECT_THROW(group_inv({1, 0, -800}, prm), NonFiniteError);
}

TEST(Modular, Values) {
  EXPECT_DOUBLE_EQ(modular({0, 0, 1}, {1.0, 2.0, 0.0}), kE);
  std::mt19937_64 rng(9);
  const SolParams uni{1.5, 1.5, 0.0};
  const SolParams non{0.5, 2.0, 0.0};
  for (int i = 0; i < 200; ++i) {
    const auto g = random_point(rng), h = random_point(rng);
    EXPECT_EQ(modular(g, uni), 1.0);
    EXPECT_LE(rel_diff(modular(group_mul(g, h, non), non), modular(g, non) * modular(h, non)),
              1e-12);
  }
}

TEST(Projections, Values) {
  const SolPoint g{1, 2, 3};
  EXPECT_EQ(proj1(g), (HypPoint{1, 3}));
  EXPECT_EQ(proj2(g), (HypPoint{2, -3}));
  EXPECT_EQ(proj1(kOrigin), (HypPoint{0, 0}));
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    const auto h = random_point(rng);
    EXPECT_EQ(hor(proj1(h)) + hor(proj2(h)), 0.0);
  }
}

TEST(HyperbolicDistance, VerticalPair) {
  EXPECT_NEAR(dist_h1({0, -1.5}, {0, 2.0}), 3.5, 1e-14);
  EXPECT_NEAR(dist_hp(2.7, {0, -1.5}, {0, 2.0}), 3.5, 1e-14);
}

TEST(HyperbolicDistance, HorizontalClosedForm) {
  for (double x : {0.01, 0.5, 1.0, 7.0, 1e3}) {
    // (r + x) / (r - x) = (r + x)^2 / 4 avoids the cancellation in r - x.
    const double r = std::sqrt(x * x + 4.0);
    EXPECT_LE(rel_diff(dist_h1({x, 0}, {0, 0}), 2.0 * std::log(0.5 * (r + x))), 1e-13) << x;
  }
}

TEST(HyperbolicDistance, ArcoshFormula) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const HypPoint a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double ez1 = std::exp(a.z), ez2 = std::exp(b.z);
    const double ref = std::acosh(1.0 + ((a.x - b.x) * (a.x - b.x) + (ez1 - ez2) * (ez1 - ez2)) /
                                            (2.0 * ez1 * ez2));
    EXPECT_NEAR(dist_h1(a, b), ref, 1e-10);
    EXPECT_DOUBLE_EQ(dist_h1(a, b), dist_h1(b, a));
  }
}

TEST(HyperbolicDistance, ShootingOracle) {
  EXPECT_NEAR(dist_h1({3, 1}, {-2, 0.5}), shooting_oracle(), 1e-6);
}

TEST(HyperbolicDistance, TriangleInequality) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const HypPoint a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    EXPECT_LE(dist_hp(1.7, a, c), dist_hp(1.7, a, b) + dist_hp(1.7, b, c) + 1e-12);
  }
}

TEST(HyperbolicDistance, ScalingIdentity) {
  for (double p : {0.5, 2.0, 3.0}) {
    const HypPoint u{0.7, -0.2}, v{-1.1, 0.9};
    EXPECT_DOUBLE_EQ(dist_hp(p, u, v), dist_h1({p * u.x, p * u.z}, {p * v.x, p * v.z}) / p);
  }
  EXPECT_THROW(dist_hp(0.0, {0, 0}, {1, 0}), DomainError);
}

TEST(HyperbolicDistance, LargeSeparationsStayFinite) {
  EXPECT_NEAR(dist_h1_log(500.0, 0.0, 0.0), 1000.0, 1e-9);
  EXPECT_NEAR(dist_h1({0, -400}, {0, 400}), 800.0, 1e-9);
}

TEST(HopConstant, IndependentOfX) {
  const double expected = 0.5 * std::acosh(3.0);
  for (double x : {2.0, 5.0, 100.0}) {
    const double h = std::log(x) / 2.0;
    EXPECT_NEAR(dist_hp(2.0, {0, h}, {x, h}), expected, 1e-13) << x;
  }
  EXPECT_NEAR(hop_constant(2.0), expected, 1e-15);
}

TEST(Bounds, LowerI) {
  EXPECT_EQ(lower_bound_i(SolPoint{0, 0, -3}), 3.0);
  EXPECT_EQ(lower_bound_i(SolPoint{5, 5, 0}), 0.0);
}

TEST(Bounds, LowerIIVacuous) {
  const SolParams prm{1, 1, 0};
  EXPECT_EQ(lower_bound_ii(SolPoint{0.5, -1.0, 2.0}, prm), 0.0);
  EXPECT_EQ(lower_bound_ii(SolPoint{0.0, 5.0, 0.0}, prm), 0.0);
}

TEST(Bounds, LowerIIExample) {
  // Newton on d + 2 log d = 40.
  double d = 30.0;
  for (int i = 0; i < 50; ++i) d -= (d + 2 * std::log(d) - 40.0) / (1.0 + 2.0 / d);
  const double e10 = std::exp(10.0);
  const double got = lower_bound_ii(SolPoint{e10, e10, 0.0}, {1, 1, 0});
  EXPECT_NEAR(got, d, 1e-9);
  EXPECT_NEAR(got, 33.0, 0.1);
}

TEST(Bounds, UpperIII) {
  const SolParams prm{1.5, 0.5, 0};
  EXPECT_NEAR(upper_bound_iii(SolPoint{0, 0, -2.25}, prm), 2.25, 1e-14);
  EXPECT_NEAR(upper_bound_iii(SolPoint{3, 0, 0}, prm), dist_hp(1.5, {3, 0}, {0, 0}), 1e-14);
}

TEST(Bounds, UpperIV) {
  const SolParams prm{1, 1, 0};
  EXPECT_NEAR(upper_bound_iv(SolPoint{1, 1, 0}, prm), 2 * std::acosh(1.5), 1e-14);
  EXPECT_THROW(upper_bound_iv(SolPoint{0, 1, 0}, prm), DomainError);
  EXPECT_THROW(upper_bound_iv(SolPoint{1, 0, 0}, prm), DomainError);
}

TEST(Bounds, UpperIVTypicalDriftedPoint) {
  // log|x| = p a t, log|y| = 0, z = a t: the bound is a t + c_p + c_q.
  const SolParams prm{1.3, 0.8, 1.0};
  for (double t : {10.0, 100.0, 1000.0}) {
    const LogSolPoint g{prm.p * t, 0.0, t};
    EXPECT_NEAR(upper_bound_iv(g, prm), t + hop_constant(1.3) + hop_constant(0.8), 1e-9);
  }
}

TEST(Bounds, LogPointMatchesPlain) {
  const SolParams prm{0.9, 1.4, 0};
  const SolPoint g{12.0, -0.03, 1.7};
  const auto lg = LogSolPoint::from(g);
  EXPECT_DOUBLE_EQ(upper_bound_iii(g, prm), upper_bound_iii(lg, prm));
  EXPECT_DOUBLE_EQ(upper_bound_iv(g, prm), upper_bound_iv(lg, prm));
  EXPECT_DOUBLE_EQ(lower_bound_ii(g, prm), lower_bound_ii(lg, prm));
}

TEST(VerticalGeodesic, Values) {
  EXPECT_EQ(vertical_geodesic(2.0, Direction::up, 0.0), (SolPoint{0, 2, 0}));
  EXPECT_EQ(vertical_geodesic(1.0, Direction::down, 3.0), (SolPoint{1, 0, -3}));
  EXPECT_THROW(vertical_geodesic(1.0, Direction::up, -1.0), DomainError);
}

TEST(DeviationProxy, Values) {
  const SolParams prm{1, 2, 1};
  EXPECT_EQ(deviation_proxy({0, 0.4, 7.0}, 0.4, prm), 0.0);
  const double ref = upper_bound_iii(SolPoint{0, 1, 0}, prm);
  for (double z : {-1.0, 0.0, 3.0, 9.0}) {
    // y - y_inf carries the rounding of 0.4 + e^{-2z}, amplified by e^{2z}.
    EXPECT_NEAR(deviation_proxy({0, 0.4 + std::exp(-2.0 * z), z}, 0.4, prm), ref, 1e-6) << z;
  }
}

TEST(HypArc, EndpointsAndHeights) {
  for (double k : {0.5, 1.0, 2.0}) {
    const HypArc arc(k, {-1.0, 0.3}, {4.0, -0.7});
    EXPECT_NEAR(arc.length(), dist_hp(k, {-1.0, 0.3}, {4.0, -0.7}), 1e-13);
    const auto end = arc.at(arc.length());
    EXPECT_NEAR(end.x, 4.0, 1e-10);
    EXPECT_NEAR(end.z, -0.7, 1e-10);
    for (double f : {0.1, 0.37, 0.5, 0.8}) {
      const double s = f * arc.length();
      const auto pt = arc.at(s);
      EXPECT_NEAR(pt.z, arc.height_at(s), 1e-9);
      // Points on a geodesic split its length additively.
      EXPECT_NEAR(dist_hp(k, {-1.0, 0.3}, pt) + dist_hp(k, pt, {4.0, -0.7}), arc.length(), 1e-9);
    }
  }
}

TEST(HypArc, RisingAndFallingInverseHeight) {
  const HypArc arc(1.0, {0, 0}, {10.0, 1.0});
  const double apex = arc.apex_length();
  ASSERT_GT(apex, 0.0);
  ASSERT_LT(apex, arc.length());
  for (double z : {0.2, 0.9, 1.0}) {
    EXPECT_NEAR(arc.height_at(arc.rising_length_at_height(z)), z, 1e-10);
    EXPECT_NEAR(arc.height_at(arc.falling_length_at_height(z)), z, 1e-10);
  }
}

TEST(HypArc, ExtremeHeightRatio) {
  const HypArc arc(1.0, {0, 0}, {1e-6, -30.0});
  const auto mid = arc.at(0.5 * arc.length());
  EXPECT_TRUE(std::isfinite(mid.x));
  EXPECT_NEAR(dist_h1({0, 0}, mid) + dist_h1(mid, {1e-6, -30.0}), arc.length(), 1e-8);
}
