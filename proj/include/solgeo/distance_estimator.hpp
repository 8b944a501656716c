#ifndef SOLGEO_DISTANCE_ESTIMATOR_HPP
#define SOLGEO_DISTANCE_ESTIMATOR_HPP

// Variational upper estimate of dist_Sol(o, g).
//
// A candidate curve is a polyline in (x, y, z) coordinates. The Riemannian
// length of a straight coordinate segment is the integral of
//   sqrt(dx^2 e^{-2p z(s)} + dy^2 e^{2q z(s)} + dz^2),
// a convex function of the segment parameter, so the trapezoid rule never
// underestimates it. Every value reported here is therefore the length of an
// actual curve from o to g, i.e. an upper bound for the distance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "solgeo/geometry.hpp"
#include "solgeo/hyperbolic_arc.hpp"

namespace solgeo {

/// Ordered vertices of a polyline; endpoints stay fixed during refinement.
struct Curve {
  std::vector<SolPoint> points;
};

/// Trapezoid-rule length of the straight coordinate segment a -> b (never
/// below the exact length of that segment).
inline double segment_length(const SolPoint& a, const SolPoint& b, const SolParams& prm) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double dz = b.z - a.z;
  if (dx == 0.0 && dy == 0.0) return std::fabs(dz);
  const double rate = std::max(prm.p, prm.q) * std::fabs(dz);
  const int sub = std::clamp(static_cast<int>(std::ceil(rate / 0.02)), 1, 4096);
  const double h = dz / sub;
  const double dx2 = dx * dx;
  const double dy2 = dy * dy;
  const double dz2 = dz * dz;
  double ex = std::exp(-2.0 * prm.p * a.z);
  double ey = std::exp(2.0 * prm.q * a.z);
  const double rx = std::exp(-2.0 * prm.p * h);
  const double ry = std::exp(2.0 * prm.q * h);
  double sum = 0.0;
  for (int i = 0; i <= sub; ++i) {
    const double f = std::sqrt(dx2 * ex + dy2 * ey + dz2);
    sum += (i == 0 || i == sub) ? 0.5 * f : f;
    ex *= rx;
    ey *= ry;
  }
  return sum / sub;
}

inline double curve_length(const Curve& c, const SolParams& prm) {
  double total = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    total += segment_length(c.points[i - 1], c.points[i], prm);
  return total;
}

namespace detail {

// A piece of a candidate path; `at` maps [0,1] to the piece, roughly uniform
// in arc length.
struct Leg {
  double length = 0.0;
  int min_segments = 1;
  std::function<SolPoint(double)> at;
};

inline Leg vertical_leg(SolPoint from, double z_to) {
  return {std::fabs(z_to - from.z), 1, [from, z_to](double u) {
            return SolPoint{from.x, from.y, from.z + u * (z_to - from.z)};
          }};
}

// Geodesic of H(p) lifted at fixed y.
inline Leg x_plane_leg(const SolParams& prm, HypPoint from, HypPoint to, double y) {
  auto arc = std::make_shared<HypArc>(prm.p, from, to);
  return {arc->length(), 16, [arc, y](double u) {
            const HypPoint h = arc->at(u * arc->length());
            return SolPoint{h.x, y, h.z};
          }};
}

// Geodesic of H(q) (coordinates (y, -z)) lifted at fixed x.
inline Leg y_plane_leg(const SolParams& prm, HypPoint from, HypPoint to, double x) {
  auto arc = std::make_shared<HypArc>(prm.q, from, to);
  return {arc->length(), 16, [arc, x](double u) {
            const HypPoint h = arc->at(u * arc->length());
            return SolPoint{x, h.x, -h.z};
          }};
}

inline Curve assemble(const std::vector<Leg>& legs_in, const SolPoint& start, int segments) {
  std::vector<const Leg*> legs;
  double total = 0.0;
  for (const auto& l : legs_in) {
    if (l.length > 1e-14) {
      legs.push_back(&l);
      total += l.length;
    }
  }
  Curve c;
  c.points.push_back(start);
  if (legs.empty()) {
    c.points.push_back(start);
    return c;
  }
  std::vector<int> n(legs.size());
  int used = 0;
  std::size_t longest = 0;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    n[i] = std::max(legs[i]->min_segments,
                    static_cast<int>(std::lround(segments * legs[i]->length / total)));
    n[i] = std::max(n[i], 1);
    used += n[i];
    if (legs[i]->length > legs[longest]->length) longest = i;
  }
  n[longest] = std::max(legs[longest]->min_segments, n[longest] + (segments - used));
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (int j = 1; j <= n[i]; ++j) c.points.push_back(legs[i]->at(static_cast<double>(j) / n[i]));
  return c;
}

inline void flip_signs(Curve& c, bool neg_x, bool neg_y) {
  for (auto& pt : c.points) {
    if (neg_x) pt.x = -pt.x;
    if (neg_y) pt.y = -pt.y;
  }
}

// Curve from the proof of the constant-free upper bound, for x, y >= 0 and
// z >= 0: along the H(q) geodesic to its last point at level 0, then both
// hyperbolic geodesics synchronised by height, then along the H(p) geodesic.
// Its length never exceeds upper_bound_iii.
inline Curve synchronised_candidate_upper(const SolPoint& g, const SolParams& prm, int segments) {
  const HypArc g1(prm.p, {0.0, 0.0}, {g.x, g.z});
  const HypArc g2(prm.q, {0.0, 0.0}, {g.y, -g.z});
  const double s1_top = g1.rising_length_at_height(g.z);
  const double s2_base = g2.falling_length_at_height(0.0);

  std::vector<Leg> legs;
  {
    auto arc = std::make_shared<HypArc>(g2);
    legs.push_back({s2_base, 8, [arc, s2_base](double u) {
                      const HypPoint h = arc->at(u * s2_base);
                      return SolPoint{0.0, h.x, -h.z};
                    }});
  }
  if (g.z > 0.0) {
    auto a1 = std::make_shared<HypArc>(g1);
    auto a2 = std::make_shared<HypArc>(g2);
    auto point_at_height = [a1, a2](double t) {
      const double x = a1->at(a1->rising_length_at_height(t)).x;
      const double y = a2->at(a2->falling_length_at_height(-t)).x;
      return SolPoint{x, y, t};
    };
    // Tabulate heights so that both arcs are resolved near their turning
    // points, then reparametrise by the length of the tabulated polyline.
    std::vector<double> ts;
    const int m = 96;
    for (int j = 0; j <= m; ++j) {
      const double u = static_cast<double>(j) / m;
      ts.push_back(u * g.z);
      ts.push_back(std::clamp(g1.height_at(u * s1_top), 0.0, g.z));
      const double s2 = s2_base + u * (g2.length() - s2_base);
      ts.push_back(std::clamp(-g2.height_at(s2), 0.0, g.z));
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    auto cum = std::make_shared<std::vector<double>>(ts.size(), 0.0);
    auto tab = std::make_shared<std::vector<double>>(ts);
    SolPoint prev = point_at_height(ts.front());
    for (std::size_t j = 1; j < ts.size(); ++j) {
      const SolPoint cur = point_at_height(ts[j]);
      (*cum)[j] = (*cum)[j - 1] + segment_length(prev, cur, prm);
      prev = cur;
    }
    const double len = cum->back();
    legs.push_back({len, 16, [cum, tab, point_at_height, len](double u) {
                      const double target = u * len;
                      auto it = std::lower_bound(cum->begin(), cum->end(), target);
                      if (it == cum->begin()) return point_at_height(tab->front());
                      if (it == cum->end()) return point_at_height(tab->back());
                      const std::size_t j = static_cast<std::size_t>(it - cum->begin());
                      const double span = (*cum)[j] - (*cum)[j - 1];
                      const double w = span > 0.0 ? (target - (*cum)[j - 1]) / span : 1.0;
                      return point_at_height((*tab)[j - 1] + w * ((*tab)[j] - (*tab)[j - 1]));
                    }});
  }
  {
    auto arc = std::make_shared<HypArc>(g1);
    const double len = g1.length() - s1_top;
    const double y = g.y;
    legs.push_back({len, 8, [arc, s1_top, len, y](double u) {
                      const HypPoint h = arc->at(s1_top + u * len);
                      return SolPoint{h.x, y, h.z};
                    }});
  }
  Curve c = assemble(legs, kOrigin, segments);
  c.points.back() = g;
  return c;
}

inline Curve synchronised_candidate(const SolPoint& g, const SolParams& prm, int segments) {
  const bool neg_x = g.x < 0.0;
  const bool neg_y = g.y < 0.0;
  SolPoint a{std::fabs(g.x), std::fabs(g.y), g.z};
  Curve c;
  if (a.z >= 0.0) {
    c = synchronised_candidate_upper(a, prm, segments);
  } else {
    // (x,y,z) -> (y,x,-z) is an isometry Sol(p,q) -> Sol(q,p).
    c = synchronised_candidate_upper({a.y, a.x, -a.z}, prm.mirrored(), segments);
    for (auto& pt : c.points) pt = {pt.y, pt.x, -pt.z};
  }
  flip_signs(c, neg_x, neg_y);
  c.points.back() = g;
  return c;
}

// Five-leg staircase: vertical, hop in one plane, vertical, hop in the other
// plane, vertical. Requires x != 0 and y != 0.
inline Curve staircase_candidate(const SolPoint& g, const SolParams& prm, bool x_first,
                                 int segments) {
  const double ax = std::fabs(g.x);
  const double ay = std::fabs(g.y);
  const double hx = std::log(ax) / prm.p;   // level of the x hop
  const double hy = -std::log(ay) / prm.q;  // level of the y hop
  std::vector<Leg> legs;
  if (x_first) {
    legs.push_back(vertical_leg(kOrigin, hx));
    legs.push_back(x_plane_leg(prm, {0.0, hx}, {ax, hx}, 0.0));
    legs.push_back(vertical_leg({ax, 0.0, hx}, hy));
    legs.push_back(y_plane_leg(prm, {0.0, -hy}, {ay, -hy}, ax));
    legs.push_back(vertical_leg({ax, ay, hy}, g.z));
  } else {
    legs.push_back(vertical_leg(kOrigin, hy));
    legs.push_back(y_plane_leg(prm, {0.0, -hy}, {ay, -hy}, 0.0));
    legs.push_back(vertical_leg({0.0, ay, hy}, hx));
    legs.push_back(x_plane_leg(prm, {0.0, hx}, {ax, hx}, ay));
    legs.push_back(vertical_leg({ax, ay, hx}, g.z));
  }
  Curve c = assemble(legs, kOrigin, segments);
  flip_signs(c, g.x < 0.0, g.y < 0.0);
  c.points.back() = g;
  return c;
}

inline Curve straight_candidate(const SolPoint& g, int segments) {
  Curve c;
  for (int j = 0; j <= segments; ++j) {
    const double u = static_cast<double>(j) / segments;
    c.points.push_back({u * g.x, u * g.y, u * g.z});
  }
  c.points.back() = g;
  return c;
}

}  // namespace detail

/// Holds a working curve from o to a target and improves it by coordinate
/// descent on the interior vertices. The reported length only ever decreases.
class DistanceEstimator {
 public:
  DistanceEstimator(SolParams prm, int segments) : prm_(prm), segments_(segments) {
    prm_.validate();
    if (segments < 2) throw DomainError("estimate_distance: segments must be >= 2");
  }

  /// Best of the straight segment, both staircases and the synchronised
  /// curve. Returns its length.
  double initialize(const SolPoint& target) {
    if (!target.finite()) throw DomainError("estimate_distance: non-finite target");
    std::vector<Curve> candidates;
    candidates.push_back(detail::straight_candidate(target, segments_));
    candidates.push_back(detail::synchronised_candidate(target, prm_, segments_));
    if (target.x != 0.0 && target.y != 0.0) {
      candidates.push_back(detail::staircase_candidate(target, prm_, true, segments_));
      candidates.push_back(detail::staircase_candidate(target, prm_, false, segments_));
    }
    double best = INFINITY;
    for (auto& c : candidates) {
      const double len = curve_length(c, prm_);
      if (len < best) {
        best = len;
        curve_ = std::move(c);
      }
    }
    seg_.resize(curve_.points.size() - 1);
    for (std::size_t i = 0; i < seg_.size(); ++i)
      seg_[i] = segment_length(curve_.points[i], curve_.points[i + 1], prm_);
    step_.assign(curve_.points.size(), 0.0);
    for (std::size_t i = 1; i + 1 < curve_.points.size(); ++i)
      step_[i] = 0.25 * std::min(seg_[i - 1], seg_[i]) + 1e-12;
    return length();
  }

  /// Runs `iters` coordinate-descent sweeps and returns the new length.
  double refine(int iters) {
    const std::size_t n = curve_.points.size();
    for (int it = 0; it < iters; ++it) {
      for (std::size_t i = 1; i + 1 < n; ++i) improve_vertex(i);
    }
    return length();
  }

  [[nodiscard]] double length() const {
    double total = 0.0;
    for (double s : seg_) total += s;
    return total;
  }

  [[nodiscard]] const Curve& curve() const { return curve_; }

 private:
  void improve_vertex(std::size_t i) {
    auto& pts = curve_.points;
    const double h = step_[i];
    if (h < 1e-13) return;
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis) {
      const SolPoint base = pts[i];
      double delta = h;
      if (axis == 0) delta = h * std::exp(prm_.p * base.z);
      if (axis == 1) delta = h * std::exp(-prm_.q * base.z);
      for (double sign : {1.0, -1.0}) {
        SolPoint trial = base;
        (axis == 0 ? trial.x : axis == 1 ? trial.y : trial.z) += sign * delta;
        const double a = segment_length(pts[i - 1], trial, prm_);
        const double b = segment_length(trial, pts[i + 1], prm_);
        if (a + b < seg_[i - 1] + seg_[i]) {
          pts[i] = trial;
          seg_[i - 1] = a;
          seg_[i] = b;
          improved = true;
          break;
        }
      }
    }
    step_[i] = improved ? 1.5 * h : 0.5 * h;
  }

  SolParams prm_;
  int segments_;
  Curve curve_;
  std::vector<double> seg_;
  std::vector<double> step_;
};

/// Length of a locally optimised curve from o to g: an upper bound for
/// dist_Sol(o, g) that never increases with `iters`.
inline double estimate_distance(const SolPoint& g, const SolParams& prm, int segments = 512,
                                int iters = 2) {
  DistanceEstimator est(prm, segments);
  est.initialize(g);
  return est.refine(iters);
}

/// Same, between two arbitrary points (by left invariance of the metric).
inline double estimate_distance_between(const SolPoint& g1, const SolPoint& g2,
                                        const SolParams& prm, int segments = 512,
                                        int iters = 2) {
  return estimate_distance(group_mul(group_inv(g1, prm), g2, prm), prm, segments, iters);
}

}  // namespace solgeo

#endif  // SOLGEO_DISTANCE_ESTIMATOR_HPP
