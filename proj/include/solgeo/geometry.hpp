#ifndef SOLGEO_GEOMETRY_HPP
#define SOLGEO_GEOMETRY_HPP

// Exact group operations on Sol(p,q), the two hyperbolic projections,
// closed-form hyperbolic distances and the certified bounds for the Sol
// distance to the origin.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "solgeo/types.hpp"

namespace solgeo {

// (a,b,c) . (x,y,z) = (e^{pc} x + a, e^{-qc} y + b, c + z)
inline SolPoint group_mul(const SolPoint& g, const SolPoint& h, const SolParams& prm) {
  SolPoint r{std::exp(prm.p * g.z) * h.x + g.x, std::exp(-prm.q * g.z) * h.y + g.y, g.z + h.z};
  if (!r.finite()) throw NonFiniteError("group_mul: non-finite product");
  return r;
}

inline SolPoint group_inv(const SolPoint& g, const SolParams& prm) {
  SolPoint r{-std::exp(-prm.p * g.z) * g.x, -std::exp(prm.q * g.z) * g.y, -g.z};
  if (!r.finite()) throw NonFiniteError("group_inv: non-finite inverse");
  return r;
}

/// Modular function e^{(q-p) z}; identically one iff p == q.
inline double modular(const SolPoint& g, const SolParams& prm) {
  return std::exp((prm.q - prm.p) * g.z);
}

inline HypPoint proj1(const SolPoint& g) { return {g.x, g.z}; }
inline HypPoint proj2(const SolPoint& g) { return {g.y, -g.z}; }

namespace detail {

// log|sinh(u)|, accurate for large |u|.
inline double log_abs_sinh(double u) {
  u = std::fabs(u);
  if (u < 20.0) return std::log(std::sinh(u));
  return u - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * u));
}

// asinh(e^{ls}) without forming e^{ls} when it would overflow.
inline double asinh_exp(double ls) {
  if (ls < 300.0) return std::asinh(std::exp(ls));
  return ls + std::numbers::ln2;
}

}  // namespace detail

/// H(1) distance between (x1,z1) and (x2,z2) given log|x1 - x2|.
///
/// Uses arcosh(1 + 2s^2) = 2 asinh(s) with
/// s^2 = (x1-x2)^2 e^{-(z1+z2)} / 4 + sinh^2((z1-z2)/2), evaluated in
/// log space so that neither e^{z} nor (x1-x2)^2 is ever formed.
inline double dist_h1_log(double log_abs_dx, double z1, double z2) {
  const double horiz = 2.0 * log_abs_dx - (z1 + z2) - 2.0 * std::numbers::ln2;
  const double vert = 2.0 * detail::log_abs_sinh(0.5 * (z1 - z2));
  const double log_s2 = detail::log_add_exp(horiz, vert);
  if (log_s2 == -INFINITY) return 0.0;
  if (std::isnan(log_s2)) throw NonFiniteError("dist_h1: NaN");
  return 2.0 * detail::asinh_exp(0.5 * log_s2);
}

/// Exact distance in the logarithmic model of the standard hyperbolic plane.
inline double dist_h1(const HypPoint& u, const HypPoint& v) {
  return dist_h1_log(std::log(std::fabs(u.x - v.x)), u.z, v.z);
}

/// Distance in H(p): (1/p) dist_H(1)((p x, p z), (p x', p z')).
inline double dist_hp(double p, const HypPoint& u, const HypPoint& v) {
  if (!(p > 0.0)) throw DomainError("dist_hp: curvature must be positive");
  return dist_h1_log(std::log(p) + std::log(std::fabs(u.x - v.x)), p * u.z, p * v.z) / p;
}

/// dist_H(p)((x, z), (0, 0)) from log|x|.
inline double dist_hp_origin_log(double p, double log_abs_x, double z) {
  return dist_h1_log(std::log(p) + log_abs_x, p * z, 0.0) / p;
}

/// Horizontal hop length at height log|x|/p: (1/p) arcosh(1 + p^2/2).
inline double hop_constant(double p) { return std::acosh(1.0 + 0.5 * p * p) / p; }

// ---------------------------------------------------------------------------
// Bounds for dist_Sol(o, g)

inline double lower_bound_i(const SolPoint& g) { return std::fabs(g.z); }
inline double lower_bound_i(const LogSolPoint& g) { return std::fabs(g.z); }

/// Largest d >= 1 with d + (1/p + 1/q) log d <= (2/p) log|x| + (2/q) log|y| - |z|,
/// or 0 when that set is empty (the inequality is vacuous).
inline double lower_bound_ii(const LogSolPoint& g, const SolParams& prm) {
  const double rhs = 2.0 * g.log_abs_x / prm.p + 2.0 * g.log_abs_y / prm.q - std::fabs(g.z);
  if (std::isnan(rhs)) throw NonFiniteError("lower_bound_ii: non-finite right-hand side");
  if (rhs <= 1.0) return 0.0;
  const double c = 1.0 / prm.p + 1.0 / prm.q;
  auto f = [c](double d) { return d + c * std::log(d); };
  double lo = 1.0;
  double hi = 1e12;
  if (!(f(hi) > rhs)) throw NonFiniteError("lower_bound_ii: right-hand side out of range");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= rhs ? lo : hi) = mid;
  }
  return lo;
}

inline double lower_bound_ii(const SolPoint& g, const SolParams& prm) {
  return lower_bound_ii(LogSolPoint::from(g), prm);
}

/// dist_H(p)((x,z),o) + dist_H(q)((y,-z),o) - |z|.
inline double upper_bound_iii(const LogSolPoint& g, const SolParams& prm) {
  const double v = dist_hp_origin_log(prm.p, g.log_abs_x, g.z) +
                   dist_hp_origin_log(prm.q, g.log_abs_y, -g.z) - std::fabs(g.z);
  return std::max(0.0, detail::checked(v, "upper_bound_iii"));
}

inline double upper_bound_iii(const SolPoint& g, const SolParams& prm) {
  return upper_bound_iii(LogSolPoint::from(g), prm);
}

/// Length of the cheaper of the two five-leg staircases (vertical legs plus
/// one horizontal hop in each plane). Requires x != 0 and y != 0.
inline double upper_bound_iv(const LogSolPoint& g, const SolParams& prm) {
  if (!std::isfinite(g.log_abs_x) || !std::isfinite(g.log_abs_y))
    throw DomainError("upper_bound_iv: requires x != 0 and y != 0");
  const double lx = g.log_abs_x / prm.p;
  const double ly = g.log_abs_y / prm.q;
  const double via_x_first = std::fabs(lx) + std::fabs(ly + g.z);
  const double via_y_first = std::fabs(lx - g.z) + std::fabs(ly);
  return hop_constant(prm.p) + hop_constant(prm.q) + std::fabs(lx + ly) +
         std::min(via_x_first, via_y_first);
}

inline double upper_bound_iv(const SolPoint& g, const SolParams& prm) {
  if (g.x == 0.0 || g.y == 0.0) throw DomainError("upper_bound_iv: requires x != 0 and y != 0");
  return upper_bound_iv(LogSolPoint::from(g), prm);
}

// ---------------------------------------------------------------------------
// Vertical geodesics and deviation from them

enum class Direction { up, down };

/// up: gamma^eta(t) = (0, eta, t);  down: gamma^xi(t) = (xi, 0, -t).
inline SolPoint vertical_geodesic(double endpoint, Direction dir, double t) {
  if (!(t >= 0.0)) throw DomainError("vertical_geodesic: t must be nonnegative");
  return dir == Direction::up ? SolPoint{0.0, endpoint, t} : SolPoint{endpoint, 0.0, -t};
}

/// Upper bound for the distance from (e^{pz} x_tilde, y_inf + e^{-qz} y_tilde, z)
/// to the upward vertical geodesic through y_inf, given the left-translated
/// coordinates directly.
inline double deviation_proxy_normalized(double x_tilde, double y_tilde, const SolParams& prm) {
  return upper_bound_iii(SolPoint{x_tilde, y_tilde, 0.0}, prm);
}

/// upper_bound_iii of (e^{-pz} x, e^{qz} (y - y_inf), 0).
inline double deviation_proxy(const SolPoint& g, double y_inf, const SolParams& prm) {
  const double xt = std::exp(-prm.p * g.z) * g.x;
  const double yt = std::exp(prm.q * g.z) * (g.y - y_inf);
  if (!std::isfinite(xt) || !std::isfinite(yt))
    throw NonFiniteError("deviation_proxy: translated point overflows");
  return deviation_proxy_normalized(xt, yt, prm);
}

}  // namespace solgeo

#endif  // SOLGEO_GEOMETRY_HPP
