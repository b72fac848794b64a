#include "vhcomp/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vhcomp/numerics.hpp"

namespace vhcomp {

namespace {

const double kPi = 3.14159265358979323846;

// Exact binomial coefficient as a double; fine for the station counts used
// here (products stay well inside double range for N up to a few hundred).
double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

double falling_factorial(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= static_cast<double>(n - i);
  return c;
}

void check_order_stat(int n, int N) {
  if (n < 1 || n > N)
    throw std::invalid_argument("order statistic index out of range");
}

} // namespace

double cdf_abs_single(double r, const NetworkConfig& cfg) {
  double gap = cfg.abs_gap();
  if (r <= gap) return 0.0;
  if (r >= cfg.r_max()) return 1.0;
  return (r * r - gap * gap) / (cfg.r_C * cfg.r_C);
}

double pdf_abs_single(double r, const NetworkConfig& cfg) {
  if (r < cfg.abs_gap() || r > cfg.r_max()) return 0.0;
  return 2.0 * r / (cfg.r_C * cfg.r_C);
}

double pdf_abs_nth(double r, int n, const NetworkConfig& cfg) {
  check_order_stat(n, cfg.N);
  if (r < cfg.abs_gap() || r > cfg.r_max()) return 0.0;
  double f = pdf_abs_single(r, cfg);
  double F = cdf_abs_single(r, cfg);
  double coeff = binom(cfg.N, n) * static_cast<double>(n);
  return coeff * f * std::pow(F, n - 1) * std::pow(1.0 - F, cfg.N - n);
}

double pdf_abs_nth_sum(double r, int n, const NetworkConfig& cfg) {
  check_order_stat(n, cfg.N);
  if (r < cfg.abs_gap() || r > cfg.r_max()) return 0.0;
  double f = pdf_abs_single(r, cfg);
  double F = cdf_abs_single(r, cfg);
  // Term-by-term derivative of the count CDF sum_{k>=n} C(N,k) F^k (1-F)^(N-k).
  double acc = 0.0;
  for (int k = n; k <= cfg.N; ++k) {
    double c = binom(cfg.N, k);
    double t = c * static_cast<double>(k) * std::pow(F, k - 1) * std::pow(1.0 - F, cfg.N - k);
    if (k < cfg.N)
      t -= c * static_cast<double>(cfg.N - k) * std::pow(F, k) * std::pow(1.0 - F, cfg.N - k - 1);
    acc += t;
  }
  return f * acc;
}

double cdf_abs_nth(double r, int n, const NetworkConfig& cfg) {
  check_order_stat(n, cfg.N);
  double F = cdf_abs_single(r, cfg);
  if (F <= 0.0) return 0.0;
  if (F >= 1.0) return 1.0;
  double acc = 0.0;
  for (int k = n; k <= cfg.N; ++k)
    acc += binom(cfg.N, k) * std::pow(F, k) * std::pow(1.0 - F, cfg.N - k);
  return acc;
}

double joint_pdf_abs(const std::array<double, 3>& r, const NetworkConfig& cfg) {
  if (cfg.N < 3) throw std::invalid_argument("joint_pdf_abs: N must be >= 3");
  double gap = cfg.abs_gap();
  double rmax = cfg.r_max();
  if (!(gap <= r[0] && r[0] <= r[1] && r[1] <= r[2] && r[2] <= rmax)) return 0.0;
  double rc2 = cfg.r_C * cfg.r_C;
  double tail = (rmax * rmax - r[2] * r[2]) / rc2;
  return falling_factorial(cfg.N, 3) * std::pow(2.0 / rc2, 3) * r[0] * r[1] * r[2] *
         std::pow(tail, cfg.N - 3);
}

double pdf_tbs_nth(double r, int n, const NetworkConfig& cfg) {
  if (n < 1) throw std::invalid_argument("order statistic index out of range");
  if (r <= cfg.h) return 0.0;
  double mu = kPi * cfg.lambda_TBS * (r * r - cfg.h * cfg.h);
  double lam = kPi * cfg.lambda_TBS;
  // 2 (pi lambda)^n r (r^2-h^2)^(n-1) exp(-mu) / (n-1)!
  double logv = std::log(2.0 * r) + n * std::log(lam) +
                (n - 1) * std::log(r * r - cfg.h * cfg.h) - mu - std::lgamma(n);
  return std::exp(logv);
}

double cdf_tbs_nth(double r, int n, const NetworkConfig& cfg) {
  if (n < 1) throw std::invalid_argument("order statistic index out of range");
  if (r <= cfg.h) return 0.0;
  double mu = kPi * cfg.lambda_TBS * (r * r - cfg.h * cfg.h);
  return reg_lower_gamma(static_cast<double>(n), mu);
}

double joint_pdf_tbs(const std::array<double, 3>& r, const NetworkConfig& cfg) {
  if (!(cfg.h <= r[0] && r[0] <= r[1] && r[1] <= r[2])) return 0.0;
  double lam = kPi * cfg.lambda_TBS;
  double mu = lam * (r[2] * r[2] - cfg.h * cfg.h);
  return std::pow(2.0 * lam, 3) * r[0] * r[1] * r[2] * std::exp(-mu);
}

std::array<double, 3> sample_ordered_abs(const NetworkConfig& cfg, RngStream& rng) {
  double gap2 = cfg.abs_gap() * cfg.abs_gap();
  double rc2 = cfg.r_C * cfg.r_C;
  // Squared 3D distance of one station is gap^2 + U * r_C^2.
  std::vector<double> d2(cfg.N);
  for (int i = 0; i < cfg.N; ++i) d2[i] = gap2 + rng.uniform() * rc2;
  std::nth_element(d2.begin(), d2.begin() + 2, d2.end());
  std::sort(d2.begin(), d2.begin() + 3);
  return {std::sqrt(d2[0]), std::sqrt(d2[1]), std::sqrt(d2[2])};
}

std::array<double, 3> sample_ordered_tbs(const NetworkConfig& cfg, RngStream& rng) {
  double lam = kPi * cfg.lambda_TBS;
  // Squared horizontal distances grow by independent Exp(pi*lambda) gaps.
  double d2 = cfg.h * cfg.h;
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) {
    d2 += rng.exponential() / lam;
    out[i] = std::sqrt(d2);
  }
  return out;
}

} // namespace vhcomp
