#ifndef SOLGEO_HARMONIC_HPP
#define SOLGEO_HARMONIC_HPP

// Modified Poisson kernels of the drifted hyperbolic Laplacians, their lifts
// to Sol as lambda-eigenfunctions of
//   Delta_a = 1/2 (e^{2pz} d_xx + e^{-2qz} d_yy + d_zz) + a d_z,
// and finite-difference checks of the identities these functions satisfy.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "solgeo/geometry.hpp"
#include "solgeo/parallel.hpp"

namespace solgeo {

inline double lambda_min(double a) { return -0.5 * a * a; }

namespace detail {

inline double spectral_root(double lambda, double a) {
  const double disc = a * a + 2.0 * lambda;
  if (!(disc >= 0.0)) throw DomainError("lambda below the bottom of the spectrum -a^2/2");
  return std::sqrt(disc);
}

}  // namespace detail

/// alpha = sqrt(a^2 + 2 lambda) - a.
inline double alpha(double lambda, double a) { return detail::spectral_root(lambda, a) - a; }

/// beta = 1/2 + sqrt(a^2 + 2 lambda) / p.
inline double beta(double lambda, double a, double p) {
  if (!(p > 0.0)) throw DomainError("beta: curvature must be positive");
  return 0.5 + detail::spectral_root(lambda, a) / p;
}

enum class Plane { first, second };

inline const char* to_string(Plane pl) { return pl == Plane::first ? "first" : "second"; }

/// Modified Poisson kernel P_{k,b,lambda}(., xi) of H(k) with drift b; an
/// empty xi stands for the distinguished boundary point varpi.
struct KernelSpec {
  Plane plane = Plane::first;
  double curvature = 1.0;
  double drift = 0.0;
  double lambda = 0.0;
  std::optional<double> xi;

  void validate() const {
    if (!(curvature > 0.0) || !std::isfinite(curvature))
      throw DomainError("KernelSpec: curvature must be positive");
    if (!std::isfinite(drift) || !std::isfinite(lambda))
      throw DomainError("KernelSpec: drift and lambda must be finite");
    if (xi && !std::isfinite(*xi)) throw DomainError("KernelSpec: xi must be finite");
    detail::spectral_root(lambda, drift);
  }
};

/// e^{alpha z} for varpi, otherwise
/// e^{alpha z} ((xi^2 + 1) / ((xi - k x)^2 + e^{2kz}))^beta.
inline double eval_kernel(const KernelSpec& spec, const HypPoint& u) {
  const double al = alpha(spec.lambda, spec.drift);
  double log_val = al * u.z;
  if (spec.xi) {
    const double k = spec.curvature;
    const double be = beta(spec.lambda, spec.drift, k);
    const double dx = *spec.xi - k * u.x;
    const double log_den = detail::log_add_exp(2.0 * std::log(std::fabs(dx)), 2.0 * k * u.z);
    log_val += be * (std::log1p(*spec.xi * *spec.xi) - log_den);
  }
  const double v = std::exp(log_val);
  if (!std::isfinite(v) || !(v > 0.0)) throw NonFiniteError("eval_kernel: value out of range");
  return v;
}

/// Finite atomic measure on R u {varpi}.
struct MeasureSpec {
  struct Atom {
    std::optional<double> xi;  // empty: varpi
    double w = 1.0;
  };
  std::vector<Atom> atoms;

  void validate() const {
    for (const auto& at : atoms) {
      if (!(at.w >= 0.0) || !std::isfinite(at.w))
        throw DomainError("MeasureSpec: weights must be finite and nonnegative");
      if (at.xi && !std::isfinite(*at.xi)) throw DomainError("MeasureSpec: xi must be finite");
    }
  }
};

/// h(x,y,z) = int P_{p,a,lambda}((x,z), xi) dnu1(xi) + int P_{q,-a,lambda}((y,-z), eta) dnu2(eta).
inline double eval_sol_eigenfunction(const MeasureSpec& nu1, const MeasureSpec& nu2,
                                     const SolParams& prm, double lambda, const SolPoint& g) {
  if (nu1.atoms.empty() && nu2.atoms.empty())
    throw DomainError("eval_sol_eigenfunction: both measures are empty");
  double h = 0.0;
  for (const auto& at : nu1.atoms)
    h += at.w * eval_kernel({Plane::first, prm.p, prm.a, lambda, at.xi}, proj1(g));
  for (const auto& at : nu2.atoms)
    h += at.w * eval_kernel({Plane::second, prm.q, -prm.a, lambda, at.xi}, proj2(g));
  return h;
}

using SolField = std::function<double(const SolPoint&)>;
using HypField = std::function<double(const HypPoint&)>;

/// Central-difference Delta_a with metric-adapted steps
/// hx = eps e^{pz}, hy = eps e^{-qz}, hz = eps (so every second difference
/// has the same 1/eps^2 weight). With `richardson` the result is
/// (4 L(eps/2) - L(eps)) / 3.
inline double apply_laplacian_fd(const SolField& f, const SolPoint& g, const SolParams& prm,
                                 double eps = 1e-3, bool richardson = false) {
  if (!(eps > 0.0)) throw DomainError("apply_laplacian_fd: eps must be positive");
  auto once = [&](double e) {
    const double hx = e * std::exp(prm.p * g.z);
    const double hy = e * std::exp(-prm.q * g.z);
    const double f0 = f(g);
    const double fxp = f({g.x + hx, g.y, g.z}), fxm = f({g.x - hx, g.y, g.z});
    const double fyp = f({g.x, g.y + hy, g.z}), fym = f({g.x, g.y - hy, g.z});
    const double fzp = f({g.x, g.y, g.z + e}), fzm = f({g.x, g.y, g.z - e});
    for (double v : {f0, fxp, fxm, fyp, fym, fzp, fzm})
      if (!std::isfinite(v)) throw NonFiniteError("apply_laplacian_fd: non-finite stencil value");
    const double second = (fxp + fxm - 2.0 * f0) + (fyp + fym - 2.0 * f0) + (fzp + fzm - 2.0 * f0);
    return 0.5 * second / (e * e) + prm.a * (fzp - fzm) / (2.0 * e);
  };
  if (!richardson) return once(eps);
  return (4.0 * once(0.5 * eps) - once(eps)) / 3.0;
}

/// Delta^{H(k)}_b = 1/2 (e^{2kz} d_xx + d_zz) + b d_z by the same scheme.
inline double apply_hyperbolic_laplacian_fd(const HypField& f, const HypPoint& u, double k,
                                            double b, double eps = 1e-3, bool richardson = false) {
  if (!(eps > 0.0)) throw DomainError("apply_hyperbolic_laplacian_fd: eps must be positive");
  auto once = [&](double e) {
    const double hx = e * std::exp(k * u.z);
    const double f0 = f(u);
    const double fxp = f({u.x + hx, u.z}), fxm = f({u.x - hx, u.z});
    const double fzp = f({u.x, u.z + e}), fzm = f({u.x, u.z - e});
    for (double v : {f0, fxp, fxm, fzp, fzm})
      if (!std::isfinite(v))
        throw NonFiniteError("apply_hyperbolic_laplacian_fd: non-finite stencil value");
    return 0.5 * ((fxp + fxm - 2.0 * f0) + (fzp + fzm - 2.0 * f0)) / (e * e) +
           b * (fzp - fzm) / (2.0 * e);
  };
  if (!richardson) return once(eps);
  return (4.0 * once(0.5 * eps) - once(eps)) / 3.0;
}

/// Tensor grid center + [-half, half] per axis with `n` points per axis.
struct GridSpec {
  SolPoint center;
  double half_x = 1.0, half_y = 1.0, half_z = 1.0;
  int nx = 5, ny = 5, nz = 5;
  double eps = 1e-3;

  void validate() const {
    if (nx < 3 || ny < 3 || nz < 3) throw DomainError("GridSpec: need at least 3 points per axis");
    if (!(eps > 0.0)) throw DomainError("GridSpec: eps must be positive");
    if (!(half_x >= 0.0 && half_y >= 0.0 && half_z >= 0.0))
      throw DomainError("GridSpec: half-widths must be nonnegative");
  }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  [[nodiscard]] SolPoint at(std::size_t idx) const {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(nx));
    const int j = static_cast<int>((idx / static_cast<std::size_t>(nx)) % static_cast<std::size_t>(ny));
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)));
    auto coord = [](double c, double h, int n, int m) { return c - h + 2.0 * h * m / (n - 1); };
    return {coord(center.x, half_x, nx, i), coord(center.y, half_y, ny, j),
            coord(center.z, half_z, nz, k)};
  }
};

/// Grid on a hyperbolic plane.
struct HypGrid {
  HypPoint center;
  double half_x = 1.0, half_z = 1.0;
  int nx = 5, nz = 5;
  double eps = 1e-3;

  void validate() const {
    if (nx < 3 || nz < 3) throw DomainError("HypGrid: need at least 3 points per axis");
    if (!(eps > 0.0)) throw DomainError("HypGrid: eps must be positive");
  }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz);
  }
  [[nodiscard]] HypPoint at(std::size_t idx) const {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(nx));
    const int k = static_cast<int>(idx / static_cast<std::size_t>(nx));
    return {center.x - half_x + 2.0 * half_x * i / (nx - 1),
            center.z - half_z + 2.0 * half_z * k / (nz - 1)};
  }
};

namespace detail {

template <class Grid, class Fn>
double grid_max(const Grid& grid, unsigned workers, Fn&& fn) {
  grid.validate();
  const auto vals = parallel_map(grid.size(), workers, [&](std::size_t i) { return fn(grid.at(i)); });
  double best = 0.0;
  for (double v : vals) {
    if (std::isnan(v)) return v;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace detail

/// max over the grid of |Delta_a h - lambda h| / |h| for the lifted
/// superposition h of eval_sol_eigenfunction.
inline double eigen_residual(const MeasureSpec& nu1, const MeasureSpec& nu2, const SolParams& prm,
                             double lambda, const GridSpec& grid, bool richardson = true,
                             unsigned workers = 1) {
  prm.validate();
  nu1.validate();
  nu2.validate();
  const SolField h = [&](const SolPoint& g) {
    return eval_sol_eigenfunction(nu1, nu2, prm, lambda, g);
  };
  return detail::grid_max(grid, workers, [&](const SolPoint& g) {
    const double v = h(g);
    return std::fabs(apply_laplacian_fd(h, g, prm, grid.eps, richardson) - lambda * v) /
           (std::fabs(v) + 1e-300);
  });
}

/// For a lambdabar-eigenfunction fbar of Delta^{H(1)}_{abar}: the larger of
/// the residual of
///   Delta_{-1/2}(e^{(abar+1/2)z} fbar) = e^{(abar+1/2)z}(Delta_abar fbar + (4abar^2-1)/8 fbar)
/// and of the transferred eigen-equation
///   Delta_{-1/2} F = (lambdabar + (4abar^2-1)/8) F,  F = e^{(abar+1/2)z} fbar,
/// both relative to |F|, maximised over the grid.
inline double conjugation_check(const HypField& fbar, double abar, double lambdabar,
                                const HypGrid& grid, bool richardson = true, unsigned workers = 1) {
  const double c = abar + 0.5;
  const double shift = (4.0 * abar * abar - 1.0) / 8.0;
  const HypField F = [&](const HypPoint& u) { return std::exp(c * u.z) * fbar(u); };
  return detail::grid_max(grid, workers, [&](const HypPoint& u) {
    const double Fu = F(u);
    const double lhs = apply_hyperbolic_laplacian_fd(F, u, 1.0, -0.5, grid.eps, richardson);
    const double inner = apply_hyperbolic_laplacian_fd(fbar, u, 1.0, abar, grid.eps, richardson);
    const double rhs = std::exp(c * u.z) * (inner + shift * fbar(u));
    const double scale = std::fabs(Fu) + 1e-300;
    return std::max(std::fabs(lhs - rhs), std::fabs(lhs - (lambdabar + shift) * Fu)) / scale;
  });
}

/// max over the grid (points of H(1)) of
/// |(Delta^{H(p)}_a f)(theta u) - p^2 Delta^{H(1)}_{a/p}(f o theta)(u)| / |f(theta u)|
/// with theta(x,z) = (x/p, z/p).
inline double scaling_check(const HypField& f, double p, double a, const HypGrid& grid,
                            bool richardson = true, unsigned workers = 1) {
  if (!(p > 0.0)) throw DomainError("scaling_check: p must be positive");
  auto theta = [p](const HypPoint& u) { return HypPoint{u.x / p, u.z / p}; };
  const HypField f_theta = [&](const HypPoint& u) { return f(theta(u)); };
  return detail::grid_max(grid, workers, [&](const HypPoint& u) {
    const HypPoint v = theta(u);
    // Step eps / p on H(p) matches step eps on H(1) under theta.
    const double lhs = apply_hyperbolic_laplacian_fd(f, v, p, a, grid.eps / p, richardson);
    const double rhs =
        p * p * apply_hyperbolic_laplacian_fd(f_theta, u, 1.0, a / p, grid.eps, richardson);
    return std::fabs(lhs - rhs) / (std::fabs(f(v)) + 1e-300);
  });
}

/// max over the grid of |Delta_a(tau f)(g) - (Delta_a f)(g0 g)| / |f(g0 g)|
/// with (tau f)(g) = f(g0 g).
inline double translation_invariance_check(const SolField& f, const SolPoint& g0,
                                           const SolParams& prm, const GridSpec& grid,
                                           bool richardson = true, unsigned workers = 1) {
  const SolField tau_f = [&](const SolPoint& g) { return f(group_mul(g0, g, prm)); };
  return detail::grid_max(grid, workers, [&](const SolPoint& g) {
    const SolPoint moved = group_mul(g0, g, prm);
    const double lhs = apply_laplacian_fd(tau_f, g, prm, grid.eps, richardson);
    const double rhs = apply_laplacian_fd(f, moved, prm, grid.eps, richardson);
    return std::fabs(lhs - rhs) / (std::fabs(f(moved)) + 1e-300);
  });
}

/// Quadrature box for the reversibility check (n midpoint cells per axis).
struct QuadratureBox {
  SolPoint center;
  double half_x = 2.5, half_y = 2.5, half_z = 2.5;
  int n = 64;
};

/// |int f Delta_a g dm_a - int g Delta_a f dm_a| / int |f Delta_a g| dm_a with
/// m_a = e^{2az} dx dy dz, by tensor midpoint quadrature. The FD step is half
/// the z-cell width, with Richardson extrapolation, so both quadrature and
/// FD errors shrink under refinement.
inline double reversibility_check(const SolField& f, const SolField& g, const SolParams& prm,
                                  const QuadratureBox& box, unsigned workers = 1) {
  prm.validate();
  if (box.n < 8) throw DomainError("reversibility_check: need at least 8 cells per axis");
  const int n = box.n;
  const double wx = 2.0 * box.half_x / n, wy = 2.0 * box.half_y / n, wz = 2.0 * box.half_z / n;
  const double eps = 0.5 * wz;
  auto cell = [&](int i, int j, int k) {
    return SolPoint{box.center.x - box.half_x + (i + 0.5) * wx,
                    box.center.y - box.half_y + (j + 0.5) * wy,
                    box.center.z - box.half_z + (k + 0.5) * wz};
  };
  // Both fields must be negligible on the outer layer of cells.
  double peak = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const bool outer = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
        if (!outer && (i % 4 || j % 4 || k % 4)) continue;
        const SolPoint c = cell(i, j, k);
        const double m = std::max(std::fabs(f(c)), std::fabs(g(c)));
        peak = std::max(peak, m);
        if (outer) edge = std::max(edge, m);
      }
  if (!(peak > 0.0)) throw DomainError("reversibility_check: fields vanish on the box");
  if (edge > 1e-6 * peak) throw DomainError("reversibility_check: box too small for the support");

  struct Sums {
    double diff = 0.0, norm = 0.0;
  };
  const auto slabs = parallel_map(static_cast<std::size_t>(n), workers, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    Sums s;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const SolPoint c = cell(i, j, k);
        const double w = std::exp(2.0 * prm.a * c.z);
        const double fv = f(c), gv = g(c);
        const double lf = apply_laplacian_fd(f, c, prm, eps, true);
        const double lg = apply_laplacian_fd(g, c, prm, eps, true);
        const double a = fv * lg;
        const double b = gv * lf;
        s.diff += w * (a - b);
        s.norm += w * std::fabs(a);
      }
    return s;
  });
  Sums total;
  for (const auto& s : slabs) {
    total.diff += s.diff;
    total.norm += s.norm;
  }
  if (!(total.norm > 0.0)) throw DomainError("reversibility_check: degenerate integrand");
  return std::fabs(total.diff) / total.norm;
}

}  // namespace solgeo

#endif  // SOLGEO_HARMONIC_HPP
