#ifndef SOLGEO_TYPES_HPP
#define SOLGEO_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace solgeo {

inline constexpr const char* kVersion = "0.1.0";

/// Raised when an argument lies outside the domain of an operation
/// (non-positive curvature, lambda below the bottom of the spectrum, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an intermediate or final value is not a finite double.
class NonFiniteError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Curvature parameters p, q of the two hyperbolic planes plus the
/// vertical drift a of the Laplacian.
struct SolParams {
  double p = 1.0;
  double q = 1.0;
  double a = 0.0;

  void validate() const {
    if (!(p > 0.0) || !std::isfinite(p))
      throw DomainError("SolParams: p must be a positive finite number");
    if (!(q > 0.0) || !std::isfinite(q))
      throw DomainError("SolParams: q must be a positive finite number");
    if (!std::isfinite(a)) throw DomainError("SolParams: a must be finite");
  }

  /// Parameters of Sol(q,p) under the isometry (x,y,z) -> (y,x,-z).
  [[nodiscard]] SolParams mirrored() const { return {q, p, -a}; }
};

/// Point (x, y, z) of Sol(p,q); z is the horocycle level.
struct SolPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  friend bool operator==(const SolPoint&, const SolPoint&) = default;
};

inline constexpr SolPoint kOrigin{0.0, 0.0, 0.0};

/// Point (x, z) of a hyperbolic plane in the logarithmic model.
struct HypPoint {
  double x = 0.0;
  double z = 0.0;

  friend bool operator==(const HypPoint&, const HypPoint&) = default;
};

/// A point of Sol stored through log|x|, log|y| and z. The metric bounds only
/// depend on |x| and |y|, and Monte Carlo endpoints overflow doubles long
/// before their logarithms do.
struct LogSolPoint {
  double log_abs_x = -INFINITY;
  double log_abs_y = -INFINITY;
  double z = 0.0;

  static LogSolPoint from(const SolPoint& g) {
    return {std::log(std::fabs(g.x)), std::log(std::fabs(g.y)), g.z};
  }
};

inline double hor(const SolPoint& g) { return g.z; }
inline double hor(const HypPoint& u) { return u.z; }

namespace detail {

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + ": non-finite result");
  return v;
}

// log(e^u + e^v) without overflow; either argument may be -inf.
inline double log_add_exp(double u, double v) {
  if (u < v) std::swap(u, v);
  if (v == -INFINITY) return u;
  return u + std::log1p(std::exp(v - u));
}

}  // namespace detail

}  // namespace solgeo

#endif  // SOLGEO_TYPES_HPP
