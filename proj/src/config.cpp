#include "vhcomp/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vhcomp {

std::array<LinkStateVector, 8> all_state_vectors() {
  std::array<LinkStateVector, 8> out;
  for (int idx = 0; idx < 8; ++idx) {
    for (int i = 0; i < 3; ++i)
      out[idx][i] = (idx >> i) & 1 ? LinkState::NLoS : LinkState::LoS;
  }
  return out;
}

int state_vector_index(const LinkStateVector& zeta) {
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    if (zeta[i] == LinkState::NLoS) idx |= 1 << i;
  return idx;
}

const char* tier_name(Tier t) { return t == Tier::ABS ? "ABS" : "TBS"; }
const char* state_name(LinkState s) { return s == LinkState::LoS ? "L" : "N"; }

std::string state_vector_name(const LinkStateVector& zeta) {
  std::string s;
  for (int i = 0; i < 3; ++i) s += state_name(zeta[i]);
  return s;
}

std::vector<std::string> validate(const NetworkConfig& cfg) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& msg) { bad.push_back(msg); };
  if (!(cfg.r_C > 0.0)) fail("r_C must be > 0");
  if (!(cfg.H > 0.0)) fail("H must be > 0");
  if (!(cfg.h > 0.0)) fail("h must be > 0");
  if (!(cfg.h < cfg.H)) fail("h must be < H (user strictly below the ABS plane)");
  if (!(cfg.h_TBS >= 0.0)) fail("h_TBS must be >= 0");
  if (cfg.N < 3) fail("N must be >= 3 (three cooperating ABSs)");
  if (!(cfg.lambda_TBS > 0.0)) fail("lambda_TBS must be > 0");
  if (!(cfg.alpha_ABS >= 2.0)) fail("alpha_ABS must be >= 2");
  if (!(cfg.alpha_TBS_L >= 2.0)) fail("alpha_TBS_L must be >= 2");
  if (!(cfg.alpha_TBS_N >= 2.0)) fail("alpha_TBS_N must be >= 2");
  if (!(cfg.m_ABS >= 0.5)) fail("m_ABS must be >= 0.5");
  if (!(cfg.m_TBS_L >= 0.5)) fail("m_TBS_L must be >= 0.5");
  if (!(cfg.m_TBS_N >= 0.5)) fail("m_TBS_N must be >= 0.5");
  if (!(cfg.Omega > 0.0)) fail("Omega must be > 0");
  if (!(cfg.gamma_ABS > 0.0)) fail("gamma_ABS must be > 0 (linear)");
  if (!(cfg.gamma_TBS > 0.0)) fail("gamma_TBS must be > 0 (linear)");
  if (!(cfg.env.a > 0.0)) fail("env.a must be > 0");
  if (!(cfg.env.b > 0.0)) fail("env.b must be > 0");
  return bad;
}

void require_valid(const NetworkConfig& cfg) {
  auto bad = validate(cfg);
  if (bad.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& m : bad) msg += "\n  " + m;
  throw std::invalid_argument(msg);
}

namespace {

using nlohmann::json;

double need_number(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("config: missing field '") + key + "'");
  if (!j.at(key).is_number()) throw std::invalid_argument(std::string("config: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

} // namespace

NetworkConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  NetworkConfig cfg;
  cfg.r_C = need_number(j, "r_C");
  cfg.H = need_number(j, "H");
  cfg.h = need_number(j, "h");
  cfg.h_TBS = need_number(j, "h_TBS");
  if (!j.contains("N")) throw std::invalid_argument("config: missing field 'N'");
  cfg.N = j.at("N").get<int>();
  cfg.lambda_TBS = need_number(j, "lambda_TBS") * 1e-6; // per km^2 -> per m^2
  cfg.alpha_ABS = need_number(j, "alpha_ABS");
  cfg.alpha_TBS_L = need_number(j, "alpha_TBS_L");
  cfg.alpha_TBS_N = need_number(j, "alpha_TBS_N");
  cfg.m_ABS = need_number(j, "m_ABS");
  cfg.m_TBS_L = need_number(j, "m_TBS_L");
  cfg.m_TBS_N = need_number(j, "m_TBS_N");
  cfg.Omega = need_number(j, "Omega");
  cfg.gamma_ABS = db_to_linear(need_number(j, "gamma_ABS"));
  cfg.gamma_TBS = db_to_linear(need_number(j, "gamma_TBS"));
  if (!j.contains("env")) throw std::invalid_argument("config: missing field 'env'");
  const auto& e = j.at("env");
  if (e.is_string()) {
    std::string name = e.get<std::string>();
    if (name == "suburban") cfg.env = Environment::suburban();
    else if (name == "highrise" || name == "highrise_urban") cfg.env = Environment::highrise_urban();
    else throw std::invalid_argument("config: unknown env preset '" + name + "'");
  } else if (e.is_object()) {
    cfg.env.a = need_number(e, "a");
    cfg.env.b = need_number(e, "b");
    cfg.env.c = need_number(e, "c");
  } else {
    throw std::invalid_argument("config: 'env' must be a preset name or an {a,b,c} object");
  }
  return cfg;
}

NetworkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const NetworkConfig& cfg) {
  json j;
  j["r_C"] = cfg.r_C;
  j["H"] = cfg.H;
  j["h"] = cfg.h;
  j["h_TBS"] = cfg.h_TBS;
  j["N"] = cfg.N;
  j["lambda_TBS"] = cfg.lambda_TBS * 1e6; // per m^2 -> per km^2
  j["alpha_ABS"] = cfg.alpha_ABS;
  j["alpha_TBS_L"] = cfg.alpha_TBS_L;
  j["alpha_TBS_N"] = cfg.alpha_TBS_N;
  j["m_ABS"] = cfg.m_ABS;
  j["m_TBS_L"] = cfg.m_TBS_L;
  j["m_TBS_N"] = cfg.m_TBS_N;
  j["Omega"] = cfg.Omega;
  j["gamma_ABS"] = linear_to_db(cfg.gamma_ABS);
  j["gamma_TBS"] = linear_to_db(cfg.gamma_TBS);
  j["env"] = {{"a", cfg.env.a}, {"b", cfg.env.b}, {"c", cfg.env.c}};
  return j.dump(2);
}

std::uint64_t config_hash(const NetworkConfig& cfg) {
  std::string s = config_to_json(cfg);
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

} // namespace vhcomp
