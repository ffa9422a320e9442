#pragma once

// Small statistics toolkit for the Monte Carlo checks: batch-means standard
// errors and Kolmogorov-Smirnov tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "betamoments/errors.hpp"

namespace betamoments {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean with the standard error from non-overlapping batch means, which stays
/// honest for autocorrelated chain output. With batches == n it is the iid formula.
inline MeanEstimate batch_means(std::span<const double> v, std::size_t batches = 64) {
  detail::require(!v.empty(), "batch_means: empty sample");
  MeanEstimate r;
  r.n = v.size();
  double total = 0.0;
  for (double x : v) total += x;
  r.mean = total / static_cast<double>(v.size());
  batches = std::min(batches, v.size());
  if (batches < 2) return r;
  const std::size_t len = v.size() / batches;
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double m = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) m += v[i];
    m /= static_cast<double>(len);
    ss += (m - r.mean) * (m - r.mean);
  }
  r.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return r;
}

/// Kolmogorov limiting survival function Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
inline double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.3) {
    // theta-function form, fast for small t: 1 - sqrt(2 pi)/t sum exp(-(2k-1)^2 pi^2 / (8 t^2))
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * t * t);
    double acc = 0.0;
    for (int k = 1; k <= 5; ++k) acc += std::exp(c * (2 * k - 1) * (2 * k - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / t * acc, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    acc += (k % 2 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

namespace detail {

// Stephens' finite-sample correction of the asymptotic distribution.
inline double ks_p_value(double d, double n_eff) {
  const double r = std::sqrt(n_eff);
  return kolmogorov_q((r + 0.12 + 0.11 / r) * d);
}

}  // namespace detail

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, detail::ks_p_value(d, na * nb / (na + nb))};
}

inline KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  detail::require(!a.empty(), "ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, detail::ks_p_value(d, n)};
}

}  // namespace betamoments
