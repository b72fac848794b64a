#include "vhcomp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vhcomp {

double los_probability(double z, double alt_diff, const Environment& env) {
  if (z < 0.0 || alt_diff <= 0.0)
    throw std::invalid_argument("los_probability: need z >= 0 and alt_diff > 0");
  double elev = z == 0.0 ? 1.5707963267948966 : std::atan(alt_diff / z);
  double raw = -env.a * std::exp(-env.b * elev) + env.c;
  return std::clamp(raw, 0.0, 1.0);
}

double los_probability_3d(double r, double alt_diff, const Environment& env) {
  if (r < alt_diff)
    throw std::invalid_argument("los_probability_3d: r below the altitude gap");
  double z = std::sqrt(std::max(0.0, r * r - alt_diff * alt_diff));
  return los_probability(z, alt_diff, env);
}

FadingParams fading_params(const NetworkConfig& cfg, Tier t, LinkState s) {
  return {cfg.m(t, s), cfg.Omega};
}

double sample_nakagami_amplitude(const FadingParams& p, RngStream& rng) {
  return std::sqrt(rng.gamma(p.m, p.omega / p.m));
}

double fading_first_moment(double m, double omega) {
  if (!(m >= 0.5) || !(omega > 0.0))
    throw std::invalid_argument("fading_first_moment: need m >= 0.5, omega > 0");
  return std::exp(std::lgamma(m + 0.5) - std::lgamma(m)) * std::sqrt(omega / m);
}

double attenuation_amplitude(double dist, double alpha) {
  if (!(dist > 0.0)) throw std::invalid_argument("attenuation_amplitude: dist must be > 0");
  return std::pow(dist, -alpha / 2.0);
}

double attenuation_power(double dist, double alpha) {
  if (!(dist > 0.0)) throw std::invalid_argument("attenuation_power: dist must be > 0");
  return std::pow(dist, -alpha);
}

} // namespace vhcomp
