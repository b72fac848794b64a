// Moment statistics and Gamma fits for the aggregate signal from the three
// cooperating stations.
//
// For a fixed link-state vector zeta the aggregates studied here are
//   U = sum_n |H_n| r_n^(-alpha_n/2) * 1{state_n = zeta_n}
//   V = sum_n       r_n^(-alpha_n/2) * 1{state_n = zeta_n}
// where state_n is the Bernoulli line-of-sight draw of link n at its own
// distance.  Their first two moments are exact; the Gamma shapes come from
// matching mean and variance.

#pragma once

#include <array>
#include <cstdint>

#include "vhcomp/config.hpp"
#include "vhcomp/numerics.hpp"

namespace vhcomp {

struct GammaFit {
  double nu;    // shape
  double theta; // scale
};

struct SignalMoments {
  // Per-slot moments of the state-gated attenuation: A_n in amplitude units,
  // B_n in power units, both marginal over the slot's ordered distance law.
  std::array<double, 3> A{};
  std::array<double, 3> B{};
  // Cross moments over the joint ordered triple, unordered pairs (0,1),
  // (0,2), (1,2); symmetric by construction.
  double C01 = 0.0, C02 = 0.0, C12 = 0.0;
  // Mean fading amplitude per slot under its zeta state.
  std::array<double, 3> Delta{};
  double omega = 1.0;

  double mean_V() const { return A[0] + A[1] + A[2]; }
  double mean_U() const { return Delta[0] * A[0] + Delta[1] * A[1] + Delta[2] * A[2]; }
  double cross_sum_V() const { return 2.0 * (C01 + C02 + C12); }
  double cross_sum_U() const {
    return 2.0 * (Delta[0] * Delta[1] * C01 + Delta[0] * Delta[2] * C02 +
                  Delta[1] * Delta[2] * C12);
  }
};

struct MomentSpec {
  QuadratureSpec quad;
  long mc_trials = 200000;  // for the cross moments
  std::uint64_t seed = 1;
  std::uint64_t stream_base = 0;
  int threads = 0;          // 0 = resolve from environment/hardware
};

// Marginal moments by adaptive quadrature, cross moments by Monte Carlo over
// exact ordered-triple draws.
SignalMoments compute_moments(Tier tier, const LinkStateVector& zeta,
                              const NetworkConfig& cfg, const MomentSpec& spec);

// All eight terrestrial state vectors at once, sharing the distance draws and
// the twelve distinct marginal integrals.  Entry order matches
// all_state_vectors().
std::array<SignalMoments, 8> compute_moments_all_tbs(const NetworkConfig& cfg,
                                                     const MomentSpec& spec);

// Moments of the ungated aggregate with every slot pinned to the same state:
// no indicator weights, one exponent and one fading law across all three
// slots.  Used when the trio shares a single line-of-sight state.
SignalMoments compute_moments_fixed(Tier tier, LinkState s, const NetworkConfig& cfg,
                                    const MomentSpec& spec);

// Gamma fits by moment matching.  Throws if the mean is zero (state vector
// carries no mass, e.g. a LoS slot in an environment without LoS) or if the
// matched variance is not positive.
GammaFit fit_gamma_U(const SignalMoments& m);
GammaFit fit_gamma_V(const SignalMoments& m);

// Integer shape used by the coverage series: round(nu), floored at 1.
int nu_tilde(double nu);

} // namespace vhcomp
