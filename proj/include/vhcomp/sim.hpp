// Full Monte Carlo ground truth: explicit network realizations, per-link
// states and fading, coherent CoMP signal combining and the resulting SIR.
// No Gamma fits or independence approximations anywhere in this module.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vhcomp/config.hpp"
#include "vhcomp/coverage.hpp"
#include "vhcomp/rng.hpp"

namespace vhcomp {

struct Deployment {
  // x, y, z in meters.  Aerial stations sit at z = H on the disk; the
  // terrestrial plane is z = 0 (the configured mast height is descriptive,
  // the distance model measures altitude from the terrestrial plane).
  std::vector<std::array<double, 3>> abs_positions;
  std::vector<std::array<double, 3>> tbs_positions;
  double region_radius = 0.0; // terrestrial realization window
};

enum class Policy {
  Comp3SameTier,  // three nearest of the tier with the stronger aggregate
  SingleNearest,  // the single strongest long-term-power station
  StrongestThree, // three strongest long-term-power stations, tiers may mix
};

struct SirSample {
  double sir_linear = 0.0; // +infinity when no interferer exists
  // Station indices into the corresponding position list; unused slots -1.
  std::array<int, 3> comp_set{-1, -1, -1};
  Tier tier = Tier::ABS; // tier of the strongest cooperating station
  LinkStateVector zeta{LinkState::LoS, LinkState::LoS, LinkState::LoS};
};

// N aerial stations uniform on the disk, Poisson-count terrestrial stations
// uniform on the window disk centered under the user.
Deployment realize_network(const NetworkConfig& cfg, double window_radius, RngStream& rng);

// Instantaneous SIR of one fading/state realization at the user position.
// Link states of terrestrial stations are drawn here, once per call.
SirSample sir_at_user(const std::array<double, 3>& user, const Deployment& dep,
                      Policy policy, const NetworkConfig& cfg, RngStream& rng);

// Fraction of realizations with SIR >= threshold, typical user at the disk
// center, fresh network per trial.  The user altitude is capped at 300 m.
CoverageReport empirical_coverage(const NetworkConfig& cfg, double gamma_db, Policy policy,
                                  long trials, std::uint64_t seed, int threads);

// Same, sharing each realization's SIR across a whole threshold grid.
std::vector<CoverageReport> empirical_coverage_sweep(const NetworkConfig& cfg,
                                                     const std::vector<double>& gamma_db,
                                                     Policy policy, long trials,
                                                     std::uint64_t seed, int threads);

} // namespace vhcomp
