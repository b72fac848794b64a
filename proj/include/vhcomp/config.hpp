// Scenario description for the two-tier network: a fixed number of aerial
// base stations (ABS) uniform on a disk at altitude H, terrestrial base
// stations (TBS) as a planar Poisson process, and the typical aerial user at
// altitude h above the TBS plane under the ABS disk center.
//
// Unit conventions: everything inside the library is SI and linear (meters,
// per square meter, linear SIR).  The JSON boundary uses the more convenient
// field units (density per km^2, thresholds in dB) and converts on load/save.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace vhcomp {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Line-of-sight curve parameters: P_LoS = clamp(-a*exp(-b*elev) + c, 0, 1)
// with the elevation angle in radians.  Presets fitted in degrees are stored
// converted (b scaled by 180/pi).
struct Environment {
  double a = 1.0;
  double b = 6.581; // per radian
  double c = 1.0;

  static Environment suburban() { return {1.0, 6.581, 1.0}; }
  static Environment highrise_urban() {
    return {1.124, 0.049 * 180.0 / 3.14159265358979323846, 1.024};
  }
};

enum class Tier { ABS, TBS };
enum class LinkState { LoS, NLoS };

// States of the three cooperating links, nearest first.
using LinkStateVector = std::array<LinkState, 3>;

// All 8 state vectors in index order; bit i of the index set means link i is
// NLoS.
std::array<LinkStateVector, 8> all_state_vectors();
int state_vector_index(const LinkStateVector& zeta);

const char* tier_name(Tier t);
const char* state_name(LinkState s);
std::string state_vector_name(const LinkStateVector& zeta); // e.g. "LNL"

struct NetworkConfig {
  double r_C = 1000.0;        // ABS disk radius [m]
  double H = 320.0;           // ABS altitude [m]
  double h = 120.0;           // aerial user altitude [m]
  double h_TBS = 30.0;        // TBS mast height [m]; bookkeeping only
  int N = 20;                 // number of ABSs on the disk
  double lambda_TBS = 20e-6;  // TBS density [1/m^2]
  double alpha_ABS = 2.0;     // path loss exponents
  double alpha_TBS_L = 2.0;
  double alpha_TBS_N = 2.7;
  double m_ABS = 2.0;         // Nakagami shape per link class
  double m_TBS_L = 2.0;
  double m_TBS_N = 1.0;
  double Omega = 1.0;         // mean fading power
  double gamma_ABS = 1.0;     // SIR thresholds, linear
  double gamma_TBS = 1.0;
  Environment env;            // G2A line-of-sight environment

  double abs_gap() const { return H - h; }
  double r_max() const { return std::sqrt(abs_gap() * abs_gap() + r_C * r_C); }

  double alpha(Tier t, LinkState s) const {
    if (t == Tier::ABS) return alpha_ABS;
    return s == LinkState::LoS ? alpha_TBS_L : alpha_TBS_N;
  }
  double m(Tier t, LinkState s) const {
    if (t == Tier::ABS) return m_ABS;
    return s == LinkState::LoS ? m_TBS_L : m_TBS_N;
  }
};

// Returns one message per violated constraint, empty when the config is
// usable.  Messages name the offending field and the bound.
std::vector<std::string> validate(const NetworkConfig& cfg);

// Throws std::invalid_argument listing all violations.
void require_valid(const NetworkConfig& cfg);

// JSON boundary.  Density arrives per km^2, SIR thresholds in dB; `env` may
// be "suburban", "highrise" or an {a, b, c} object with b per radian.
NetworkConfig config_from_json(const std::string& text);
NetworkConfig load_config(const std::string& path);
std::string config_to_json(const NetworkConfig& cfg);

// FNV-1a over the canonical JSON form; stamped into experiment manifests.
std::uint64_t config_hash(const NetworkConfig& cfg);

} // namespace vhcomp
