// Coverage-aware aerial station placement: SIR-gap weight maps, the
// fading-aware clustering iteration, a classical weighted K-means baseline,
// and the four-strategy system-level comparison over a grid.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vhcomp/config.hpp"
#include "vhcomp/rng.hpp"
#include "vhcomp/sim.hpp"

namespace vhcomp {

struct WeightedSamples {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights; // max(0, threshold - mean SIR), in dB
};

struct ClusterState {
  std::vector<std::array<double, 2>> centers;
  std::vector<int> assignment; // per sample point, index into centers
  double objective = 0.0;      // kernel sum (fading-aware) or weighted SSE (classical)
  int iterations = 0;
  bool converged = false;          // center moves fell under epsilon
  int centroid_decreases = 0;      // kernel-objective drops during center updates
  bool degenerate_weights = false; // all weights zero, centers left untouched
};

// Success-probability kernel (1 + d^alpha / m)^(-m) of a point at squared
// distance dist_sq from a center.
double deploy_kernel(double dist_sq, double alpha, double m);

// Kernel objective of a center set under best-center assignment.
double kernel_objective(const WeightedSamples& samples,
                        const std::vector<std::array<double, 2>>& centers, double alpha,
                        double m);

// Mean-SIR shortfall weights over the grid: at each point the SIR of the
// terrestrial CoMP service is averaged in dB over fading/state draws and
// compared against the configured terrestrial threshold.
WeightedSamples sir_gap_weights(const std::vector<std::array<double, 2>>& grid,
                                const Deployment& dep, const NetworkConfig& cfg,
                                long trials, std::uint64_t seed, int threads);

// Weighted K-means++ style seeding; degenerates to uniform seeding when all
// weights vanish.
ClusterState kmeanspp_init(const WeightedSamples& samples, int k, RngStream& rng);

// Alternates best-kernel assignment with kernel-weighted centroid updates
// (weights frozen at the pre-update center) until every center moves less
// than epsilon or t_max iterations elapse.  Returns the best iterate seen.
ClusterState fading_aware_kmeans(const WeightedSamples& samples, int k, double alpha,
                                 double m, double epsilon, int t_max, ClusterState init);

// Lloyd iterations on the weighted squared-distance objective.
ClusterState classical_weighted_kmeans(const WeightedSamples& samples, int k,
                                       double epsilon, int t_max, ClusterState init);

struct GridSpec {
  double side = 1000.0; // square region [-side/2, side/2]^2
  int cells = 40;       // cells per axis; samples at cell centers
};

std::vector<std::array<double, 2>> grid_points(const GridSpec& grid);

struct StrategyResult {
  std::string name;
  std::vector<double> coverage; // row-major over the grid, y slow axis
  double aggregate = 0.0;       // mean cell coverage
  std::vector<std::array<double, 2>> abs_xy;
};

struct StrategyComparison {
  GridSpec grid;
  std::vector<StrategyResult> strategies; // tbs-only, random, classical, fading-aware
  WeightedSamples weights;
  std::vector<std::array<double, 2>> tbs_xy;
};

// Per-cell empirical coverage of a combined deployment.  Service selection:
// each tier offers the triangle of its own Delaunay map containing the user
// (all stations when a tier has fewer than three); the stronger long-term
// aggregate serves, everything else interferes.
std::vector<double> strategy_coverage_map(const NetworkConfig& cfg, const Deployment& dep,
                                          const GridSpec& grid, double gamma_db,
                                          long trials_per_cell, std::uint64_t seed,
                                          int threads);

// The four deployment strategies on one terrestrial realization: no aerial
// stations, K placed uniformly at random, K by classical weighted K-means on
// the shortfall map, K by the fading-aware iteration on the same map.
StrategyComparison compare_strategies(const NetworkConfig& cfg, const GridSpec& grid, int k,
                                      double gamma_db, long trials_per_cell,
                                      std::uint64_t seed, int threads);

} // namespace vhcomp
