// Association between the aerial and terrestrial tiers.  A user compares the
// aggregate fading amplitude of its three nearest aerial stations with that
// of its three nearest terrestrial ones and serves from the stronger trio.
// The terrestrial trio shares one line-of-sight state per realization, drawn
// at a representative horizontal distance; aerial links are always line of
// sight.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vhcomp/config.hpp"
#include "vhcomp/sigstats.hpp"

namespace vhcomp {

struct AssociationResult {
  double p_abs = 0.0;
  double p_tbs = 0.0;
  double std_error = 0.0;
  std::string method;
};

// How often the three strongest stations (long-term power, both tiers pooled)
// are all aerial, all terrestrial, or mixed.
struct ConfigurationSplit {
  double all_abs = 0.0;
  double all_tbs = 0.0;
  double mixed = 0.0;
};

enum class UserPlacement {
  Center,        // typical user under the disk center (matches the analysis)
  UniformRegion, // uniform over the axis-aligned square of side 2*r_C
};

struct AssocSpec {
  MomentSpec moments;           // drives the terrestrial Gamma fits
  long trials = 20000;          // outer average over aerial triples
  std::uint64_t seed = 2;
  std::uint64_t stream_base = 4096;
  UserPlacement placement = UserPlacement::Center;
  int threads = 0;
};

// Representative horizontal distance at which the common terrestrial state is
// drawn: the root mean square planar distance of the third nearest station,
// sqrt(3 / (pi * lambda)).
double shared_state_distance(const NetworkConfig& cfg);

// Gamma fits of the terrestrial fading aggregate with the trio pinned to one
// state, indexed [LoS, NLoS].
std::array<GammaFit, 2> tbs_u_state_fits(const NetworkConfig& cfg,
                                         const MomentSpec& spec);

// The eight per-state-vector Gamma fits of the terrestrial distance
// aggregate; entries without mass (impossible state vectors) are nullopt and
// contribute a sure win to the product below.
std::array<std::optional<GammaFit>, 8> tbs_v_fits(const NetworkConfig& cfg,
                                                  const MomentSpec& spec);

// Average, over exact aerial triple draws, of the product across the eight
// state vectors of the fitted terrestrial CDF at the aerial aggregate: the
// probability that the aerial side beats every gated terrestrial aggregate
// at once (equivalently, the realized one, which is their maximum).
AssociationResult assoc_prob_abs_given_fits(
    const std::array<std::optional<GammaFit>, 8>& fits, const NetworkConfig& cfg,
    long trials, std::uint64_t seed, std::uint64_t stream_base, int threads);

// Aerial association probability in mixture form: the fixed-state terrestrial
// aggregates get Gamma fits, and their CDFs, evaluated at the realized aerial
// aggregate, are mixed with the state probabilities at the representative
// distance.  The outer average runs over user position (per the placement),
// aerial triples, and aerial fading.
AssociationResult assoc_prob_abs_analytic(const NetworkConfig& cfg, const AssocSpec& spec);

struct AssocMcResult {
  AssociationResult assoc;
  ConfigurationSplit split;
};

// Ground-truth estimator: realizes both trios, draws the shared terrestrial
// state and per-link fading, and compares the aggregate amplitudes directly.
// Also tallies the composition of the three strongest of the six pooled
// candidates by long-term mean power under the drawn state.
AssocMcResult assoc_prob_mc(const NetworkConfig& cfg, long trials, std::uint64_t seed,
                            UserPlacement placement, int threads);

struct RegimeReport {
  std::vector<double> h_grid;
  std::vector<double> p_abs;
  double h_threshold = 0.0;  // altitude of the curve minimum on the grid
  double min_value = 0.0;
  bool u_shaped = false;
  // Altitudes where the curve crosses one half, ascending (0 to 2 entries;
  // only populated for U-shaped curves).
  std::vector<double> half_heights;
  std::string classification;
};

// Pure curve analysis on precomputed samples: minimizer, U-shape test, and
// half-crossing classification with linear-interpolation crossing estimates.
RegimeReport classify_curve(const std::vector<double>& h_grid,
                            const std::vector<double>& p_abs);

// Sweeps the user altitude over the grid (config otherwise fixed), classifies
// the curve, then sharpens any 0.5-crossings by bisection on the two monotone
// branches.
RegimeReport regime_analysis(const NetworkConfig& base, const std::vector<double>& h_grid,
                             const AssocSpec& spec);

} // namespace vhcomp
