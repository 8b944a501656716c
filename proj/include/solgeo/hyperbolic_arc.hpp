#ifndef SOLGEO_HYPERBOLIC_ARC_HPP
#define SOLGEO_HYPERBOLIC_ARC_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <algorithm>
#include <limits>

#include "solgeo/geometry.hpp"

namespace solgeo {

/// Geodesic segment of H(k) between two points of the logarithmic model.
///
/// Internally works in the upper half plane of H(1) with X = k x, W = e^{k z}.
/// Points are produced from whichever endpoint is closer, through the Cayley
/// map centred at that endpoint, so arcs with very large height ratios keep
/// full relative precision.
class HypArc {
 public:
  HypArc(double curvature, HypPoint from, HypPoint to)
      : k_(curvature), from_(from), to_(to) {
    if (!(k_ > 0.0)) throw DomainError("HypArc: curvature must be positive");
    length1_ = dist_h1_log(std::log(k_) + std::log(std::fabs(to.x - from.x)), k_ * from.z,
                           k_ * to.z);
    vertical_ = (from.x == to.x);
    if (!vertical_) locate_apex();
  }

  /// Length in the H(k) metric.
  [[nodiscard]] double length() const { return length1_ / k_; }
  [[nodiscard]] HypPoint from() const { return from_; }
  [[nodiscard]] HypPoint to() const { return to_; }

  /// Point at H(k)-arc length s from `from` (0 <= s <= length()).
  [[nodiscard]] HypPoint at(double s) const {
    const double sigma = std::clamp(s * k_, 0.0, length1_);
    if (length1_ == 0.0) return from_;
    if (sigma <= 0.5 * length1_) return toward(from_, to_, sigma);
    return toward(to_, from_, length1_ - sigma);
  }

  /// Height of the point at arc length s.
  [[nodiscard]] double height_at(double s) const {
    const double sigma = s * k_;
    if (vertical_) return from_.z + (to_.z >= from_.z ? s : -s);
    return (apex_h_ - log_cosh(sigma - apex_sigma_)) / k_;
  }

  /// Arc length at which the geodesic, followed from `from`, first reaches
  /// height z while rising (requires from.z <= z <= apex height).
  [[nodiscard]] double rising_length_at_height(double z) const {
    if (vertical_) return std::fabs(z - from_.z);
    return (apex_sigma_ - acosh_exp(apex_h_ - k_ * z)) / k_;
  }

  /// Arc length at which the geodesic reaches height z on its descending side.
  [[nodiscard]] double falling_length_at_height(double z) const {
    if (vertical_) return std::fabs(z - from_.z);
    return (apex_sigma_ + acosh_exp(apex_h_ - k_ * z)) / k_;
  }

  [[nodiscard]] double apex_length() const {
    if (vertical_) return to_.z >= from_.z ? length() : 0.0;
    return apex_sigma_ / k_;
  }

  [[nodiscard]] bool vertical() const { return vertical_; }

 private:
  static double log_cosh(double u) {
    u = std::fabs(u);
    return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
  }
  // acosh(e^v) for v >= 0.
  static double acosh_exp(double v) {
    if (v <= 0.0) return 0.0;
    return v + std::log1p(std::sqrt(-std::expm1(-2.0 * v)));
  }

  HypPoint toward(HypPoint a, HypPoint b, double sigma) const {
    using C = std::complex<double>;
    const double w0 = std::exp(k_ * a.z);
    // b in coordinates where a sits at i.
    const C w((k_ * (b.x - a.x)) / w0, std::exp(k_ * (b.z - a.z)));
    const C i(0.0, 1.0);
    const C one_minus_zeta = 2.0 * i / (w + i);
    const C zeta = 1.0 - one_minus_zeta;
    const double phi = std::arg(zeta);
    const C dir = std::polar(1.0, phi);
    const double r = std::tanh(0.5 * sigma);
    const C zs = r * dir;
    const C ws = i * (1.0 + zs) / (1.0 - zs);
    return {a.x + ws.real() * w0 / k_, a.z + std::log(ws.imag()) / k_};
  }

  // Along a non-vertical geodesic the scaled height k z follows
  // h(sigma) = h_apex - log cosh(sigma - sigma_apex).
  void locate_apex() {
    const double h0 = k_ * from_.z;
    const double h1 = k_ * to_.z;
    const double d = length1_;
    // g is strictly decreasing in sigma_apex.
    auto g = [&](double sa) { return log_cosh(d - sa) - log_cosh(sa) - (h0 - h1); };
    double lo = -d - 800.0;
    double hi = d + 800.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
      if (hi - lo < 1e-14 * (1.0 + std::fabs(mid))) break;
    }
    apex_sigma_ = 0.5 * (lo + hi);
    apex_h_ = h0 + log_cosh(apex_sigma_);
  }

  double k_;
  HypPoint from_;
  HypPoint to_;
  double length1_ = 0.0;
  bool vertical_ = true;
  double apex_sigma_ = 0.0;
  double apex_h_ = 0.0;
};

}  // namespace solgeo

#endif  // SOLGEO_HYPERBOLIC_ARC_HPP
