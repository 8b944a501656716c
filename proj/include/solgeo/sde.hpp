#ifndef SOLGEO_SDE_HPP
#define SOLGEO_SDE_HPP

// Brownian motion with vertical drift on Sol(p,q):
//   Z_t = a t + W_t,  X_t = int e^{p Z_s} dW^1_s,  Y_t = int e^{-q Z_s} dW^2_s.
//
// X and Vp = int e^{2pZ} ds are kept relative to a running scale e^{S_x}
// (resp. e^{2 S_x}) that is raised whenever p Z - S_x grows large, and
// likewise for Y and Vq. log|X_t| therefore stays available long after X_t
// itself has left the double range.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "solgeo/geometry.hpp"
#include "solgeo/rng.hpp"

namespace solgeo {

enum class Scheme {
  euler,        // left-point Ito sums
  time_change,  // X = B^1 at the clock Vp, Y = B^2 at the clock Vq
};

inline const char* to_string(Scheme s) { return s == Scheme::euler ? "euler" : "time-change"; }

enum class PathStatus { complete, truncated };

struct SimConfig {
  SolParams params;
  double dt = 1e-3;
  double T = 1.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::euler;
  std::size_t decimate = 1;  // keep every n-th step in a BrownianPath

  /// Number of steps; T must be a multiple of dt.
  [[nodiscard]] std::uint64_t steps() const {
    validate();
    return static_cast<std::uint64_t>(std::llround(T / dt));
  }

  void validate() const {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be positive");
    if (!(T >= dt) || !std::isfinite(T)) throw DomainError("SimConfig: need 0 < dt <= T");
    const double n = T / dt;
    if (n > 9e15) throw DomainError("SimConfig: T/dt too large");
    if (std::fabs(n - std::round(n)) > 1e-6 * std::max(1.0, n) + 1e-9)
      throw DomainError("SimConfig: T must be a multiple of dt");
    if (decimate == 0) throw DomainError("SimConfig: decimate must be >= 1");
  }
};

/// Instantaneous state of a simulated path in scaled form.
struct PathState {
  double t = 0.0;
  double W = 0.0;
  double Z = 0.0;
  double x = 0.0;  // X = x e^{sx}
  double y = 0.0;  // Y = y e^{sy}
  double sx = 0.0;
  double sy = 0.0;
  double vp = 0.0;  // Vp = vp e^{2 sx}
  double vq = 0.0;  // Vq = vq e^{2 sy}

  [[nodiscard]] double X() const { return x * std::exp(sx); }
  [[nodiscard]] double Y() const { return y * std::exp(sy); }
  [[nodiscard]] double Vp() const { return vp * std::exp(2.0 * sx); }
  [[nodiscard]] double Vq() const { return vq * std::exp(2.0 * sy); }
  [[nodiscard]] double log_abs_X() const { return std::log(std::fabs(x)) + sx; }
  [[nodiscard]] double log_abs_Y() const { return std::log(std::fabs(y)) + sy; }
  [[nodiscard]] double log_Vp() const { return std::log(vp) + 2.0 * sx; }
  [[nodiscard]] double log_Vq() const { return std::log(vq) + 2.0 * sy; }

  [[nodiscard]] LogSolPoint log_point() const { return {log_abs_X(), log_abs_Y(), Z}; }
  /// Plain coordinates; NonFiniteError when X or Y exceeds the double range.
  [[nodiscard]] SolPoint point() const {
    SolPoint g{X(), Y(), Z};
    if (!g.finite()) throw NonFiniteError("PathState: coordinates exceed double range");
    return g;
  }
};

/// Steps one path of `config` (path number `index` of its seed) and calls
/// visit(k, state) after every step k = 1..steps (and once with k = 0).
/// Returning false from visit stops early. The path is truncated only if the
/// scaled state itself stops being finite.
template <class Visit>
PathStatus walk_path(const SimConfig& cfg, std::uint64_t index, Visit&& visit) {
  const std::uint64_t n = cfg.steps();
  const double p = cfg.params.p;
  const double q = cfg.params.q;
  const double a = cfg.params.a;
  const double dt = cfg.dt;
  const double sdt = std::sqrt(dt);
  const bool euler = cfg.scheme == Scheme::euler;
  constexpr double kRebase = 300.0;

  NormalStream nw(cfg.seed, index, Channel::W);
  NormalStream n1(cfg.seed, index, Channel::W1);
  NormalStream n2(cfg.seed, index, Channel::W2);

  PathState s;
  double ex = 1.0;  // e^{pZ - sx}
  double ey = 1.0;  // e^{-qZ - sy}
  if (!visit(std::uint64_t{0}, static_cast<const PathState&>(s))) return PathStatus::complete;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const double dw = sdt * nw();
    const double g1 = n1();
    const double g2 = n2();
    const double z_new = s.Z + a * dt + dw;
    // Raise the scales before forming the new exponentials.
    if (p * z_new - s.sx > kRebase) {
      const double shift = p * z_new - s.sx;
      const double f = std::exp(-shift);
      s.x *= f;
      s.vp *= f * f;
      ex *= f;
      s.sx += shift;
    }
    if (-q * z_new - s.sy > kRebase) {
      const double shift = -q * z_new - s.sy;
      const double f = std::exp(-shift);
      s.y *= f;
      s.vq *= f * f;
      ey *= f;
      s.sy += shift;
    }
    const double ex_new = std::exp(p * z_new - s.sx);
    const double ey_new = std::exp(-q * z_new - s.sy);
    const double dvp = 0.5 * dt * (ex * ex + ex_new * ex_new);
    const double dvq = 0.5 * dt * (ey * ey + ey_new * ey_new);
    if (euler) {
      s.x += ex * sdt * g1;
      s.y += ey * sdt * g2;
    } else {
      s.x += std::sqrt(dvp) * g1;
      s.y += std::sqrt(dvq) * g2;
    }
    s.vp += dvp;
    s.vq += dvq;
    s.Z = z_new;
    s.W += dw;
    s.t = static_cast<double>(k) * dt;
    ex = ex_new;
    ey = ey_new;
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.vp) ||
        !std::isfinite(s.vq) || !std::isfinite(s.Z))
      return PathStatus::truncated;
    if (!visit(k, static_cast<const PathState&>(s))) return PathStatus::complete;
  }
  return PathStatus::complete;
}

/// Decimated sample path in plain coordinates.
struct BrownianPath {
  std::vector<double> times, W, X, Y, Z, Vp, Vq;
  PathStatus status = PathStatus::complete;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] SolPoint point(std::size_t i) const { return {X[i], Y[i], Z[i]}; }
};

namespace detail {

inline BrownianPath record_path(SimConfig cfg, Scheme scheme, std::uint64_t index) {
  cfg.scheme = scheme;
  BrownianPath path;
  const std::uint64_t n = cfg.steps();
  const std::size_t keep = static_cast<std::size_t>(n / cfg.decimate) + 2;
  for (auto* v : {&path.times, &path.W, &path.X, &path.Y, &path.Z, &path.Vp, &path.Vq})
    v->reserve(keep);
  bool overflow = false;
  const auto status = walk_path(cfg, index, [&](std::uint64_t k, const PathState& s) {
    if (k % cfg.decimate != 0 && k != n) return true;
    const double X = s.X(), Y = s.Y(), Vp = s.Vp(), Vq = s.Vq();
    if (!std::isfinite(X) || !std::isfinite(Y) || !std::isfinite(Vp) || !std::isfinite(Vq)) {
      overflow = true;
      return false;
    }
    path.times.push_back(s.t);
    path.W.push_back(s.W);
    path.X.push_back(X);
    path.Y.push_back(Y);
    path.Z.push_back(s.Z);
    path.Vp.push_back(Vp);
    path.Vq.push_back(Vq);
    return true;
  });
  path.status = (overflow || status == PathStatus::truncated) ? PathStatus::truncated
                                                              : PathStatus::complete;
  return path;
}

}  // namespace detail

/// Euler path with left-point (Ito) evaluation of the integrands.
inline BrownianPath simulate_path(const SimConfig& cfg, std::uint64_t index = 0) {
  return detail::record_path(cfg, Scheme::euler, index);
}

/// Time-change path: X and Y increments are centred Gaussians with the
/// variances of the clock increments.
inline BrownianPath simulate_time_change(const SimConfig& cfg, std::uint64_t index = 0) {
  return detail::record_path(cfg, Scheme::time_change, index);
}

/// Path with the scheme selected in the config.
inline BrownianPath simulate(const SimConfig& cfg, std::uint64_t index = 0) {
  return detail::record_path(cfg, cfg.scheme, index);
}

/// State at the end of the horizon.
inline PathState terminal_state(const SimConfig& cfg, std::uint64_t index) {
  PathState last;
  const auto status = walk_path(cfg, index, [&](std::uint64_t, const PathState& s) {
    last = s;
    return true;
  });
  if (status == PathStatus::truncated) throw NonFiniteError("terminal_state: path truncated");
  return last;
}

/// States at the given (increasing) grid times, all within [0, T].
inline std::vector<PathState> observe(const SimConfig& cfg, std::uint64_t index,
                                      std::span<const double> times) {
  std::vector<std::uint64_t> ks;
  for (double t : times) {
    const double r = t / cfg.dt;
    if (t < 0.0 || t > cfg.T * (1 + 1e-12) || std::fabs(r - std::round(r)) > 1e-6)
      throw DomainError("observe: times must be grid points in [0, T]");
    if (!ks.empty() && static_cast<std::uint64_t>(std::llround(r)) < ks.back())
      throw DomainError("observe: times must be increasing");
    ks.push_back(static_cast<std::uint64_t>(std::llround(r)));
  }
  std::vector<PathState> out;
  out.reserve(ks.size());
  std::size_t next = 0;
  const auto status = walk_path(cfg, index, [&](std::uint64_t k, const PathState& s) {
    while (next < ks.size() && ks[next] == k) {
      out.push_back(s);
      ++next;
    }
    return next < ks.size();
  });
  if (status == PathStatus::truncated) throw NonFiniteError("observe: path truncated");
  return out;
}

/// g1^{-1} g2: the increment between two positions of a path.
inline SolPoint increment(const SolPoint& g1, const SolPoint& g2, const SolParams& prm) {
  return group_mul(group_inv(g1, prm), g2, prm);
}

/// Cut-off time after which e^{-q Z_t} <= e^{-margin} holds unless the
/// Brownian part sits `sigmas` standard deviations below its mean, i.e. the
/// root of a T - sigmas sqrt(T) = margin / q.
inline double y_infinity_horizon(const SolParams& prm, double margin = 16.0, double sigmas = 4.5) {
  prm.validate();
  if (!(prm.a > 0.0)) throw DomainError("y_infinity_horizon: requires a > 0");
  const double c = sigmas;
  const double r = (c + std::sqrt(c * c + 4.0 * prm.a * margin / prm.q)) / (2.0 * prm.a);
  return r * r;
}

/// Y at the cut-off time t_inf (rounded up to the grid), an estimate of the
/// a.s. limit Y_infinity for a > 0. Uses cfg.params, dt, seed and scheme.
inline double y_infinity(const SimConfig& cfg, double t_inf, std::uint64_t index = 0) {
  if (!(cfg.params.a > 0.0)) throw DomainError("y_infinity: requires a > 0");
  if (!(t_inf > 0.0)) throw DomainError("y_infinity: cut-off must be positive");
  SimConfig c = cfg;
  c.T = std::ceil(t_inf / cfg.dt - 1e-9) * cfg.dt;
  const PathState s = terminal_state(c, index);
  return detail::checked(s.Y(), "y_infinity");
}

/// X at the cut-off time, the analogue for a < 0.
inline double x_infinity(const SimConfig& cfg, double t_inf, std::uint64_t index = 0) {
  if (!(cfg.params.a < 0.0)) throw DomainError("x_infinity: requires a < 0");
  if (!(t_inf > 0.0)) throw DomainError("x_infinity: cut-off must be positive");
  SimConfig c = cfg;
  c.T = std::ceil(t_inf / cfg.dt - 1e-9) * cfg.dt;
  const PathState s = terminal_state(c, index);
  return detail::checked(s.X(), "x_infinity");
}

}  // namespace solgeo

#endif  // SOLGEO_SDE_HPP
