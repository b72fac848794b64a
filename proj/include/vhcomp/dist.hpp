// Ordered service distance laws seen from the typical user at the ABS disk
// center: the n-th nearest of N uniformly placed aerial stations, and the
// n-th nearest point of the planar Poisson terrestrial process.  Distances
// are 3D; supports are [H-h, r_max] and (h, inf) respectively.

#pragma once

#include <array>

#include "vhcomp/config.hpp"
#include "vhcomp/rng.hpp"

namespace vhcomp {

struct OrderedDistances {
  std::array<double, 3> r; // nearest first
  Tier tier;
};

// Single aerial station: horizontal position uniform on the disk, so the 3D
// distance CDF is (r^2 - (H-h)^2) / r_C^2 on [H-h, r_max].
double cdf_abs_single(double r, const NetworkConfig& cfg);
double pdf_abs_single(double r, const NetworkConfig& cfg);

// n-th nearest of N aerial stations (order statistic of the law above).
// The compact Beta-kernel form is the production path; the expanded
// binomial-sum form obtained by differentiating the count CDF term by term is
// kept for cross-checking, the two are algebraically identical.
double pdf_abs_nth(double r, int n, const NetworkConfig& cfg);
double pdf_abs_nth_sum(double r, int n, const NetworkConfig& cfg);
double cdf_abs_nth(double r, int n, const NetworkConfig& cfg);

// Joint law of the three nearest aerial stations on r1 <= r2 <= r3.
double joint_pdf_abs(const std::array<double, 3>& r, const NetworkConfig& cfg);

// n-th nearest terrestrial station: Poisson counts on the disk of horizontal
// radius sqrt(r^2 - h^2).
double pdf_tbs_nth(double r, int n, const NetworkConfig& cfg);
double cdf_tbs_nth(double r, int n, const NetworkConfig& cfg);
double joint_pdf_tbs(const std::array<double, 3>& r, const NetworkConfig& cfg);

// Exact draws of the three nearest distances per tier.  The aerial sampler
// realizes all N stations and sorts; the terrestrial one uses the sequential
// conditional law r_k^2 = r_{k-1}^2 - log(U)/(pi*lambda).
std::array<double, 3> sample_ordered_abs(const NetworkConfig& cfg, RngStream& rng);
std::array<double, 3> sample_ordered_tbs(const NetworkConfig& cfg, RngStream& rng);

} // namespace vhcomp
