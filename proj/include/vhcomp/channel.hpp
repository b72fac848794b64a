// Propagation primitives: ground-to-air line-of-sight probability, Nakagami-m
// small-scale fading, and power-law attenuation.

#pragma once

#include "vhcomp/config.hpp"
#include "vhcomp/rng.hpp"

namespace vhcomp {

// Probability that a ground-to-air link is line of sight, as a function of the
// horizontal distance z and the altitude difference between the endpoints.
// The raw curve -a*exp(-b*atan(alt/z)) + c is clamped onto [0,1]; presets can
// push it past either end.  z = 0 means the station is directly underneath the
// user (elevation pi/2).  Air-to-air links are always line of sight and do not
// go through this function.
double los_probability(double z, double alt_diff, const Environment& env);

// Same curve addressed by the 3D link distance r >= alt_diff; the horizontal
// distance is recovered from the geometry.
double los_probability_3d(double r, double alt_diff, const Environment& env);

struct FadingParams {
  double m;     // Nakagami shape
  double omega; // mean power E[H^2]
};

FadingParams fading_params(const NetworkConfig& cfg, Tier t, LinkState s);

// Nakagami amplitude: sqrt of a Gamma(m, omega/m) power draw.
double sample_nakagami_amplitude(const FadingParams& p, RngStream& rng);

// E[H] for a Nakagami amplitude: Gamma(m + 1/2) / Gamma(m) * sqrt(omega/m).
double fading_first_moment(double m, double omega);

// Distance attenuation in amplitude (d^(-alpha/2)) and power (d^(-alpha)).
double attenuation_amplitude(double dist, double alpha);
double attenuation_power(double dist, double alpha);

} // namespace vhcomp
