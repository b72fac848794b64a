// Semi-analytic coverage probability: conditional serving-distance laws,
// Laplace transforms of the interference (and of its square root), and the
// tier-weighted coverage combination.  Distance and interference expectations
// are Monte Carlo; everything else (Gamma fits, transforms, series) is
// closed form.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vhcomp/assoc.hpp"
#include "vhcomp/config.hpp"
#include "vhcomp/dist.hpp"
#include "vhcomp/numerics.hpp"
#include "vhcomp/sigstats.hpp"

namespace vhcomp {

// P(all three ordered distances of the tier exceed r componentwise), via
// counting: no station closer than r[0], at most one closer than r[1], at
// most two closer than r[2].
double joint_ccdf_abs(const std::array<double, 3>& r, const NetworkConfig& cfg);
double joint_ccdf_tbs(const std::array<double, 3>& r, const NetworkConfig& cfg);

struct ConditionalDistanceLaw {
  Tier tier;
  double normalizer; // acceptance probability of the rejection sampler
  std::function<double(const std::array<double, 3>&)> ccdf_other_tier;
};

// Builds the law of the serving triple given that the other tier loses the
// componentwise distance comparison; the normalizer is estimated by MC.
ConditionalDistanceLaw conditional_law(Tier tier, const NetworkConfig& cfg, long trials,
                                       std::uint64_t seed, int threads);

// Rejection sampler for that law: own-tier triples accepted with probability
// equal to the other tier's joint CCDF.  Aborts when the empirical acceptance
// rate falls under 1e-3.
OrderedDistances conditional_sample(Tier tier, const NetworkConfig& cfg, RngStream& rng);

// Laplace transform of the aggregate interference power at argument u,
// conditioned on the serving tier and the third serving distance r3.
// Terrestrial interferers: Poisson field outside the exclusion ring, split
// over both link states.  Aerial interferers: the non-cooperating stations,
// uniform on the annulus between the exclusion radius and the disk edge.
double laplace_interference(double u, double r3, Tier tier, const NetworkConfig& cfg,
                            const QuadratureSpec& spec = {});

// Laplace transform of sqrt(I) by the Gaussian-kernel integral over the
// plain transform.
double laplace_sqrt_interference(double s, double r3, Tier tier, const NetworkConfig& cfg,
                                 const QuadratureSpec& spec = {});

// E[(sqrt(I))^k * exp(-s*sqrt(I))] by simulation of the conditioned
// interference field; k = 0 reduces to the transform above.
McEstimate laplace_sqrt_moment(double s, int k, double r3, Tier tier,
                               const NetworkConfig& cfg, long trials, std::uint64_t seed,
                               int threads);

// One draw of the aggregate interference power given serving tier and r3.
// Exposed for the oracle tests; coverage evaluation uses it internally.
double sample_interference(Tier serving, double r3, const NetworkConfig& cfg,
                           double tbs_window_radius, RngStream& rng);

// Radius of the simulated terrestrial interference window and the analytic
// bound on the mean interference ignored beyond it (as a fraction of the
// in-window mean).
double default_window_radius(const NetworkConfig& cfg);
double window_tail_fraction(const NetworkConfig& cfg, double window_radius);

// Probability that an Erlang(shape, scale 1) variable exceeds x, written as
// the truncated exponential series; the per-interference-draw coverage term.
double coverage_series(int shape, double x);

struct CoverageReport {
  double p_total = 0.0;
  double p_abs_cond = 0.0; // coverage given aerial association
  double p_tbs_cond = 0.0;
  AssociationResult assoc;
  double gamma_db = 0.0;
  std::string method;
  double se_abs_cond = 0.0;
  double se_tbs_cond = 0.0;
  long trials = 0;
};

struct CoverageSpec {
  MomentSpec moments;          // Gamma fitting inputs
  long assoc_trials = 20000;   // aerial-triple draws for the association
  long triple_trials = 4000;   // conditional triples per tier
  int fields_per_triple = 8;   // interference draws per triple
  std::uint64_t seed = 3;
  int threads = 0;
};

// Coverage at a single threshold (applied to both tiers), and a sweep that
// shares the fits, association, triples and interference draws across the
// whole threshold grid.
CoverageReport coverage_analytic(const NetworkConfig& cfg, double gamma_db,
                                 const CoverageSpec& spec);
std::vector<CoverageReport> coverage_analytic_sweep(const NetworkConfig& cfg,
                                                    const std::vector<double>& gamma_db,
                                                    const CoverageSpec& spec);

} // namespace vhcomp
