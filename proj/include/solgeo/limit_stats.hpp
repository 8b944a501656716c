#ifndef SOLGEO_LIMIT_STATS_HPP
#define SOLGEO_LIMIT_STATS_HPP

// Monte Carlo functionals of Brownian motion on Sol: normalised coordinates,
// distance surrogates, rate of escape, the limit Y_infinity, deviation from
// the limit geodesic and the boundary piece a path converges to.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "solgeo/geometry.hpp"
#include "solgeo/parallel.hpp"
#include "solgeo/rng.hpp"
#include "solgeo/sde.hpp"
#include "solgeo/stats.hpp"

namespace solgeo {

namespace detail {

inline SimConfig with_horizon(SimConfig cfg, double t) {
  cfg.T = t;
  cfg.validate();
  return cfg;
}

inline void require_drift_guard(const SolParams& prm, double t, const char* what) {
  if (prm.a > 0.0 && prm.p * prm.a * t < 10.0)
    throw DomainError(std::string(what) + ": need p a t >= 10 for a > 0");
  if (prm.a < 0.0 && prm.q * -prm.a * t < 10.0)
    throw DomainError(std::string(what) + ": need q |a| t >= 10 for a < 0");
}

}  // namespace detail

/// N normalised triples at time t:
///   a > 0: ((log|X| - p a t), log|Y|, Z - a t) / sqrt(t)
///   a < 0: (log|X|, log|Y| - q |a| t, Z - a t) / sqrt(t)
///   a = 0: (log|X|, log|Y|, Z) / sqrt(t)
inline TripleSampleSet clt_sample(const SimConfig& cfg, std::size_t N, double t,
                                  unsigned workers = 1) {
  const SimConfig c = detail::with_horizon(cfg, t);
  const SolParams& prm = c.params;
  detail::require_drift_guard(prm, t, "clt_sample");
  const double shift_x = prm.a > 0.0 ? prm.p * prm.a * t : 0.0;
  const double shift_y = prm.a < 0.0 ? prm.q * -prm.a * t : 0.0;
  const double rt = std::sqrt(t);
  const auto states =
      parallel_map(N, workers, [&](std::size_t i) { return terminal_state(c, i); });
  TripleSampleSet out;
  out.first.label = prm.a > 0.0 ? "(log|X_t|-pat)/sqrt(t)" : "log|X_t|/sqrt(t)";
  out.second.label = prm.a < 0.0 ? "(log|Y_t|-q|a|t)/sqrt(t)" : "log|Y_t|/sqrt(t)";
  out.third.label = "(Z_t-at)/sqrt(t)";
  for (auto* s : {&out.first, &out.second, &out.third}) {
    s->t = t;
    s->values.reserve(N);
  }
  for (const auto& s : states) {
    out.first.values.push_back((s.log_abs_X() - shift_x) / rt);
    out.second.values.push_back((s.log_abs_Y() - shift_y) / rt);
    out.third.values.push_back((s.Z - prm.a * t) / rt);
  }
  return out;
}

/// N draws of the reference law. std_normal fills only `first`; the Brownian
/// functional fills (p max W, -q min W, W_1) over [0,1] from a random walk
/// with `steps` Gaussian increments.
inline TripleSampleSet reference_sample(const ReferenceLaw& law, std::size_t N, std::size_t steps,
                                        std::uint64_t seed, unsigned workers = 1) {
  TripleSampleSet out;
  if (law.kind == ReferenceLaw::Kind::std_normal) {
    out.first.label = "N";
    out.first.values.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
      out.first.values.push_back(NormalStream(seed, i, Channel::reference).at(0));
    return out;
  }
  if (steps < 10000) throw DomainError("reference_sample: need at least 1e4 steps");
  if (!(law.p > 0.0) || !(law.q > 0.0)) throw DomainError("reference_sample: p, q must be > 0");
  struct Draw {
    double hi, lo, end;
  };
  const double h = 1.0 / std::sqrt(static_cast<double>(steps));
  const auto draws = parallel_map(N, workers, [&](std::size_t i) {
    NormalStream ns(seed, i, Channel::reference);
    double w = 0.0, hi = 0.0, lo = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      w += h * ns();
      hi = std::max(hi, w);
      lo = std::min(lo, w);
    }
    return Draw{hi, lo, w};
  });
  out.first.label = "p*max(W)";
  out.second.label = "-q*min(W)";
  out.third.label = "W_1";
  for (const auto& d : draws) {
    out.first.values.push_back(law.p * d.hi);
    out.second.values.push_back(-law.q * d.lo);
    out.third.values.push_back(d.end);
  }
  return out;
}

/// 2(M_max - M_min) - |N| from a scaled Brownian functional sample.
inline SampleSet distance_reference(const TripleSampleSet& bm, const ReferenceLaw& law) {
  if (bm.second.N() != bm.first.N() || bm.third.N() != bm.first.N())
    throw DomainError("distance_reference: needs a Brownian functional sample");
  SampleSet out;
  out.label = "2(max-min)-|N|";
  for (std::size_t i = 0; i < bm.N(); ++i) {
    const double hi = bm.first.values[i] / law.p;
    const double lo = -bm.second.values[i] / law.q;
    out.values.push_back(2.0 * (hi - lo) - std::fabs(bm.third.values[i]));
  }
  return out;
}

struct EscapeInterval {
  double low = 0.0;
  double high = 0.0;
  double se_low = 0.0;  // Monte Carlo standard errors of the two means
  double se_high = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  // paths with X = 0 or Y = 0
};

/// Monte Carlo means of |Z_t| / t and upper_bound_iv(Z_t) / t, with their
/// standard errors.
inline EscapeInterval escape_rate(const SimConfig& cfg, double t, std::size_t N,
                                  unsigned workers = 1) {
  if (t < 100.0) throw DomainError("escape_rate: need t >= 100");
  const SimConfig c = detail::with_horizon(cfg, t);
  const auto pts = parallel_map(N, workers, [&](std::size_t i) {
    const PathState s = terminal_state(c, i);
    return s.log_point();
  });
  EscapeInterval r;
  std::vector<double> lo, hi;
  for (const auto& g : pts) {
    if (!std::isfinite(g.log_abs_x) || !std::isfinite(g.log_abs_y)) {
      ++r.skipped;
      continue;
    }
    lo.push_back(lower_bound_i(g) / t);
    hi.push_back(upper_bound_iv(g, c.params) / t);
  }
  r.used = lo.size();
  if (r.used < 2) throw DomainError("escape_rate: fewer than two usable paths");
  r.low = mean(lo);
  r.high = mean(hi);
  r.se_low = standard_error(lo);
  r.se_high = standard_error(hi);
  return r;
}

/// Distance surrogate used for the distance CLT: upper_bound_iv for a != 0,
/// min(upper_bound_iii, upper_bound_iv) for a = 0.
inline double distance_surrogate(const LogSolPoint& g, const SolParams& prm) {
  if (prm.a != 0.0) return upper_bound_iv(g, prm);
  return std::min(upper_bound_iii(g, prm), upper_bound_iv(g, prm));
}

/// (D_t - |a| t) / sqrt(t) for a != 0 and D_t / sqrt(t) for a = 0, with
/// D_t = distance_surrogate(Z_t). Paths with X = 0 or Y = 0 are dropped.
inline SampleSet dist_clt_sample(const SimConfig& cfg, std::size_t N, double t,
                                 unsigned workers = 1) {
  const SimConfig c = detail::with_horizon(cfg, t);
  detail::require_drift_guard(c.params, t, "dist_clt_sample");
  const auto pts = parallel_map(N, workers,
                                [&](std::size_t i) { return terminal_state(c, i).log_point(); });
  SampleSet out;
  out.t = t;
  out.label = c.params.a != 0.0 ? "(D_t-|a|t)/sqrt(t)" : "D_t/sqrt(t)";
  const double rt = std::sqrt(t);
  for (const auto& g : pts) {
    if (!std::isfinite(g.log_abs_x) || !std::isfinite(g.log_abs_y)) continue;
    out.values.push_back((distance_surrogate(g, c.params) - std::fabs(c.params.a) * t) / rt);
  }
  return out;
}

/// N estimates of Y_infinity (a > 0), each taken at the cut-off t_inf.
inline SampleSet y_infinity_sample(const SimConfig& cfg, std::size_t N, double t_inf,
                                   unsigned workers = 1) {
  SampleSet out;
  out.label = "Y_inf";
  out.t = t_inf;
  out.values = parallel_map(N, workers, [&](std::size_t i) { return y_infinity(cfg, t_inf, i); });
  return out;
}

// ---------------------------------------------------------------------------
// Deviation from the limit geodesic

struct DeviationPoint {
  std::int64_t n = 0;
  double ratio = 0.0;  // deviation_proxy(Z_n, y_inf) / log n
};

/// proxy / log n at the integer times n >= 2 of a recorded path.
inline std::vector<DeviationPoint> deviation_profile(const BrownianPath& path, double y_inf,
                                                     const SolParams& prm) {
  if (prm.a == 0.0) throw DomainError("deviation_profile: requires a != 0");
  std::vector<DeviationPoint> out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double t = path.times[i];
    const double n = std::round(t);
    if (n < 2.0 || std::fabs(t - n) > 1e-9) continue;
    out.push_back({static_cast<std::int64_t>(n),
                   deviation_proxy(path.point(i), y_inf, prm) / std::log(n)});
  }
  return out;
}

/// max of proxy / log n over n in [T/2, T].
inline double deviation_summary(const std::vector<DeviationPoint>& profile, double T) {
  double best = 0.0;
  bool any = false;
  for (const auto& d : profile) {
    if (static_cast<double>(d.n) >= 0.5 * T && static_cast<double>(d.n) <= T) {
      best = std::max(best, d.ratio);
      any = true;
    }
  }
  if (!any) throw DomainError("deviation_summary: no integer times in [T/2, T]");
  return best;
}

/// deviation_summary for one Euler path of horizon T (a > 0), computed
/// without ever forming X_t, Y_t or Y_infinity. Along the path
///   X~_n = e^{-p Z_n} X_n,  Y~_n = e^{q Z_n} (Y_n - Y_infinity)
/// obey X~_{k+1} = e^{-p dZ_k}(X~_k + dW^1_k) per step and, over unit times,
/// Y~_n = e^{-q (Z_{n+1} - Z_n)} Y~_{n+1} - v_n with
/// v_n = sum_{k in [n, n+1)} e^{-q (Z_k - Z_n)} dW^2_k. The backward recursion
/// starts from Y~ = 0 at T + lead; its error at n <= T is of order
/// e^{-q (Z_{T+lead} - Z_T)}.
inline double deviation_summary_stable(const SimConfig& cfg, std::uint64_t index, double T,
                                       double lead = 60.0) {
  const SolParams& prm = cfg.params;
  prm.validate();
  if (!(prm.a > 0.0)) throw DomainError("deviation_summary_stable: requires a > 0");
  const double per_unit = 1.0 / cfg.dt;
  const auto m = static_cast<std::int64_t>(std::llround(per_unit));
  if (std::fabs(per_unit - static_cast<double>(m)) > 1e-9 * per_unit || m < 1)
    throw DomainError("deviation_summary_stable: 1/dt must be an integer");
  if (T < 1000.0 || T != std::round(T))
    throw DomainError("deviation_summary_stable: T must be an integer >= 1000");
  const auto n_total = static_cast<std::int64_t>(T + std::ceil(lead));
  const auto n_first = static_cast<std::int64_t>(std::ceil(0.5 * T));
  const auto n_last = static_cast<std::int64_t>(T);

  NormalStream nw(cfg.seed, index, Channel::W);
  NormalStream n1(cfg.seed, index, Channel::W1);
  NormalStream n2(cfg.seed, index, Channel::W2);
  const double sdt = std::sqrt(cfg.dt);
  std::vector<double> w(static_cast<std::size_t>(n_total));
  std::vector<double> v(static_cast<std::size_t>(n_total));
  std::vector<double> xt(static_cast<std::size_t>(n_last - n_first + 1));
  double x_tilde = 0.0;
  for (std::int64_t n = 0; n < n_total; ++n) {
    double rel = 0.0;  // Z_k - Z_n
    double acc = 0.0;
    for (std::int64_t j = 0; j < m; ++j) {
      const double dz = prm.a * cfg.dt + sdt * nw();
      const double d1 = sdt * n1();
      const double d2 = sdt * n2();
      acc += std::exp(-prm.q * rel) * d2;
      x_tilde = std::exp(-prm.p * dz) * (x_tilde + d1);
      rel += dz;
    }
    w[static_cast<std::size_t>(n)] = rel;
    v[static_cast<std::size_t>(n)] = acc;
    if (n + 1 >= n_first && n + 1 <= n_last) xt[static_cast<std::size_t>(n + 1 - n_first)] = x_tilde;
  }
  double y_tilde = 0.0;
  double best = 0.0;
  for (std::int64_t n = n_total - 1; n >= n_first; --n) {
    y_tilde = std::exp(-prm.q * w[static_cast<std::size_t>(n)]) * y_tilde - v[static_cast<std::size_t>(n)];
    if (n <= n_last) {
      const double proxy = deviation_proxy_normalized(xt[static_cast<std::size_t>(n - n_first)], y_tilde, prm);
      best = std::max(best, proxy / std::log(static_cast<double>(n)));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Boundary classification

enum class BoundaryPiece {
  varpi_p_times_R,  // Z -> +inf, Y converges: (varpi_p, Y_inf)
  R_times_varpi_q,  // Z -> -inf, X converges: (X_inf, varpi_q)
  varpi_pq,         // both projections escape to their distinguished points
  undecided,
};

inline const char* to_string(BoundaryPiece b) {
  switch (b) {
    case BoundaryPiece::varpi_p_times_R: return "varpi_p x R";
    case BoundaryPiece::R_times_varpi_q: return "R x varpi_q";
    case BoundaryPiece::varpi_pq: return "(varpi_p, varpi_q)";
    case BoundaryPiece::undecided: return "undecided";
  }
  return "undecided";
}

struct BoundaryRule {
  double growth = 50.0;       // G: escape threshold for |X| + e^{Z} etc.
  double min_rate = 0.25;     // |Z_T| / T needed to call linear drift
  double cauchy_tol = 1e-3;   // |V_T - V_{T/2}| <= tol (1 + |V_T|)
};

/// Label from end-of-path statistics of a recorded path.
inline BoundaryPiece boundary_classify(const BrownianPath& path, const SolParams& prm,
                                       const BoundaryRule& rule = {}) {
  if (path.size() < 3) throw DomainError("boundary_classify: path too short");
  if (path.status != PathStatus::complete) return BoundaryPiece::undecided;
  const std::size_t last = path.size() - 1;
  const double T = path.times[last];
  const auto half_it = std::lower_bound(path.times.begin(), path.times.end(), 0.5 * T);
  const auto half = static_cast<std::size_t>(half_it - path.times.begin());
  const double z = path.Z[last];
  const double log_g = std::log(rule.growth);
  auto settled = [&](const std::vector<double>& v) {
    return std::fabs(v[last] - v[half]) <= rule.cauchy_tol * (1.0 + std::fabs(v[last]));
  };
  (void)prm;
  if (z / T >= rule.min_rate && z >= log_g && settled(path.Y)) return BoundaryPiece::varpi_p_times_R;
  if (-z / T >= rule.min_rate && -z >= log_g && settled(path.X)) return BoundaryPiece::R_times_varpi_q;
  const double proj1_escape = std::fabs(path.X[last]) + std::exp(z);
  const double proj2_escape = std::fabs(path.Y[last]) + std::exp(-z);
  if (proj1_escape >= rule.growth && proj2_escape >= rule.growth) return BoundaryPiece::varpi_pq;
  return BoundaryPiece::undecided;
}

}  // namespace solgeo

#endif  // SOLGEO_LIMIT_STATS_HPP
