#include "vhcomp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace vhcomp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Decorrelate streams by running the (seed, stream_id) pair through a
  // splitmix64 chain before seeding the engine.
  std::uint64_t x = seed ^ (stream_id * 0xd1342543de82ef95ULL);
  std::uint64_t a = splitmix64(x);
  std::uint64_t b = splitmix64(x);
  eng_.seed(a ^ (b << 1));
}

std::uint64_t RngStream::next_u64() { return eng_(); }

double RngStream::uniform() {
  // 53 random bits, centered in the mantissa grid so 0 and 1 are unreachable.
  return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RngStream::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double RngStream::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("RngStream::gamma: shape and scale must be positive");
  if (shape < 1.0) {
    double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0, scale) * boost;
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double RngStream::exponential() { return -std::log(uniform()); }

long RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Count unit-rate arrivals in [0, mean].  One log per arrival; fine for the
  // means this library sees (at most a few thousand points per window).
  long k = 0;
  double t = exponential();
  while (t <= mean) {
    ++k;
    t += exponential();
  }
  return k;
}

} // namespace vhcomp
