#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wavicle {

// Two-sided Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_statistic(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Asymptotic critical value c(alpha) / sqrt(n) for the one-sample test.
inline double ks_critical(std::size_t n, double alpha = 0.01) {
  double c = 0.0;
  if (alpha == 0.10)
    c = 1.22385;
  else if (alpha == 0.05)
    c = 1.35810;
  else if (alpha == 0.01)
    c = 1.62762;
  else
    throw std::invalid_argument("ks_critical: supported alpha are 0.10, 0.05, 0.01");
  return c / std::sqrt(static_cast<double>(n));
}

// CDF of amp * cos(U) with U uniform on the circle: the arcsine law on
// [-amp, amp].  amp <= 0 degenerates to a point mass at zero.
inline double arcsine_cdf(double x, double amplitude) {
  if (amplitude <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  if (x <= -amplitude) return 0.0;
  if (x >= amplitude) return 1.0;
  return 1.0 - std::acos(x / amplitude) / 3.14159265358979323846;
}

}  // namespace wavicle
