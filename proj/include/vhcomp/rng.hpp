// Seedable random streams for Monte Carlo work.
//
// Every stochastic routine in the library takes an explicit stream so results
// are reproducible from (seed, stream_id) alone.  The samplers are implemented
// here instead of using <random> distributions because the standard leaves
// distribution algorithms implementation-defined; fixing them keeps outputs
// byte-identical across compilers and across worker counts.

#pragma once

#include <cstdint>
#include <random>

namespace vhcomp {

class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1 exactly.
  double uniform();
  double uniform(double a, double b);

  // Standard normal via Box-Muller.  No cached spare: the stream position
  // depends only on the number of calls made, not on call history.
  double normal();

  // Gamma(shape, scale) by the Marsaglia-Tsang squeeze (shape >= 1) with the
  // usual power boost for shape < 1.
  double gamma(double shape, double scale);

  // Exponential(rate 1) and Poisson counts via exponential waiting times.
  double exponential();
  long poisson(double mean);

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 eng_;
};

} // namespace vhcomp
