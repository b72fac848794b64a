// Shared helpers for the test suites: KS distance against an analytic CDF
// and simple moment accumulation.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Two-sided Kolmogorov-Smirnov distance of a sample against a CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    worst = std::max({worst, std::abs(f - lo), std::abs(f - hi)});
  }
  return worst;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0; // standard error of the sample mean
};

inline Moments sample_moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= (n - 1.0);
  m.se_mean = std::sqrt(m.var / n);
  return m;
}

} // namespace testutil
