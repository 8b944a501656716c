#ifndef SOLGEO_STATS_HPP
#define SOLGEO_STATS_HPP

// Samples, Kolmogorov-Smirnov distances, Hill tail estimates and reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "solgeo/types.hpp"

namespace solgeo {

struct SampleSet {
  std::string label;
  std::vector<double> values;
  double t = 0.0;  // horizon the sample refers to (0 if not applicable)

  [[nodiscard]] std::size_t N() const { return values.size(); }
};

/// Componentwise samples of a random triple.
struct TripleSampleSet {
  SampleSet first, second, third;

  [[nodiscard]] std::size_t N() const { return first.N(); }
};

struct ReferenceLaw {
  enum class Kind { std_normal, scaled_bm_functional };
  Kind kind = Kind::std_normal;
  double p = 1.0;  // scaled_bm_functional: (p max W, -q min W, W_1) on [0,1]
  double q = 1.0;
};

struct TestReport {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  bool pass = false;
};

/// pass is defined as value <= threshold (NaN fails).
inline TestReport make_report(std::string name, double value, double threshold, std::size_t n,
                              std::uint64_t seed) {
  return {std::move(name), value, threshold, n, seed, value <= threshold};
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw DomainError("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased sample standard deviation.
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) throw DomainError("stddev: need at least two values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double standard_error(const std::vector<double>& v) {
  return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double skewness(const std::vector<double>& v) {
  const double m = mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    m2 += (x - m) * (x - m);
    m3 += (x - m) * (x - m) * (x - m);
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

/// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double prob) {
  if (v.empty()) throw DomainError("quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: probability out of range");
  std::sort(v.begin(), v.end());
  const double pos = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

inline std::vector<double> sorted_finite(const std::vector<double>& v, const char* what) {
  std::vector<double> s(v);
  for (double x : s)
    if (std::isnan(x)) throw DomainError(std::string(what) + ": NaN in sample");
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

/// sup |F_n - F| against an analytic law. Only the standard normal has a
/// closed-form distribution function; the Brownian functional has to be
/// compared through a reference sample.
inline double ks_statistic(const SampleSet& sample, const ReferenceLaw& law) {
  if (law.kind != ReferenceLaw::Kind::std_normal)
    throw DomainError("ks_statistic: law has no analytic CDF; compare against a reference sample");
  if (sample.values.empty()) throw DomainError("ks_statistic: empty sample");
  const auto s = detail::sorted_finite(sample.values, "ks_statistic");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance sup |F_n - G_m|.
inline double ks_statistic(const SampleSet& sample, const SampleSet& reference) {
  if (sample.values.empty() || reference.values.empty())
    throw DomainError("ks_statistic: empty sample");
  const auto a = detail::sorted_finite(sample.values, "ks_statistic");
  const auto b = detail::sorted_finite(reference.values, "ks_statistic");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

struct TailEstimate {
  double kappa_hat = 0.0;
  std::size_t k = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Hill estimator of the tail exponent from the k largest of |values|:
/// kappa = k / sum_{i<k} log(x_(N-i) / x_(N-k)).
inline TailEstimate tail_exponent(const std::vector<double>& values, std::size_t k) {
  std::vector<double> x;
  x.reserve(values.size());
  for (double v : values)
    if (std::fabs(v) > 0.0 && std::isfinite(v)) x.push_back(std::fabs(v));
  if (k < 1) throw DomainError("tail_exponent: k must be positive");
  if (x.size() < k + 1) throw DomainError("tail_exponent: fewer than k + 1 positive samples");
  if (k > values.size() / 10) throw DomainError("tail_exponent: k must not exceed N/10");
  std::nth_element(x.begin(), x.end() - static_cast<std::ptrdiff_t>(k + 1), x.end());
  const double threshold = *(x.end() - static_cast<std::ptrdiff_t>(k + 1));
  double sum = 0.0;
  for (auto it = x.end() - static_cast<std::ptrdiff_t>(k); it != x.end(); ++it)
    sum += std::log(*it / threshold);
  if (!(sum > 0.0)) throw DomainError("tail_exponent: degenerate upper tail");
  TailEstimate est;
  est.k = k;
  est.kappa_hat = static_cast<double>(k) / sum;
  const double half = 1.96 / std::sqrt(static_cast<double>(k));
  est.ci_low = est.kappa_hat * (1.0 - half);
  est.ci_high = est.kappa_hat * (1.0 + half);
  return est;
}

}  // namespace solgeo

#endif  // SOLGEO_STATS_HPP
