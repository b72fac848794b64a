// Scalar special functions, adaptive quadrature, and the Monte Carlo
// scaffolding shared by the analytical and simulation paths.
//
// The blocked Monte Carlo driver is the reason fixed seeds reproduce results
// bit for bit regardless of worker count: work is cut into blocks of a fixed
// size, each block owns a private stream derived from its index, and partial
// results are reduced in block order by pairwise summation.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "vhcomp/rng.hpp"

namespace vhcomp {

// Regularized incomplete gamma functions P(nu, x) and Q(nu, x) = 1 - P.
// Series expansion for x < nu + 1, Lentz continued fraction otherwise.
double reg_lower_gamma(double nu, double x);
double reg_upper_gamma(double nu, double x);

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 256;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 over [lo, hi].  An infinite upper limit is
// accepted and mapped onto a finite interval internally.
QuadResult integrate_1d(const std::function<double(double)>& f, double lo,
                        double hi, const QuadratureSpec& spec = {});

// Tree summation; the result depends only on the contents of the array, not
// on how the work that filled it was scheduled.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

// Number of trials per Monte Carlo block.  Fixed so that the block layout,
// and therefore the reduction tree, never depends on the worker count.
inline constexpr long kMcBlock = 256;

// Worker count: explicit argument if > 0, else the VHCOMP_THREADS environment
// variable, else the hardware concurrency.
int resolve_thread_count(int requested);

// Runs fn(block_index, first_trial, last_trial) over consecutive blocks of
// kMcBlock trials.  Blocks are claimed atomically by the workers; each call of
// fn must write only to state owned by its block.
void run_blocked(long trials, int threads,
                 const std::function<void(long, long, long)>& fn);

// Mean of accumulate(rng) over `trials` draws, with the blocked scheme above.
// Each block b draws from RngStream(seed, stream_base + b).
McEstimate blocked_mc_mean(long trials, std::uint64_t seed,
                           std::uint64_t stream_base, int threads,
                           const std::function<double(RngStream&)>& draw);

// Mean of g over ordered distance triples produced by `sampler`.
McEstimate integrate_ordered_triple_mc(
    const std::function<double(const std::array<double, 3>&)>& g,
    const std::function<std::array<double, 3>(RngStream&)>& sampler,
    long trials, std::uint64_t seed, std::uint64_t stream_base, int threads);

} // namespace vhcomp
