// Ground-truth Monte Carlo: realized stations, drawn link states, Nakagami
// fading, coherent combining over the cooperating set and explicit
// interference sums.

#include "vhcomp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vhcomp/channel.hpp"

namespace vhcomp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSimStreamBase = 0x400000;

struct Station {
  double dist;       // 3-D distance to the user
  double power_lt;   // long-term mean received power
  double alpha;      // path loss exponent of the drawn state
  double m;          // Nakagami shape of the drawn state
  LinkState state;
  Tier tier;
  int index;         // position within its tier's list
};

} // namespace

Deployment realize_network(const NetworkConfig& cfg, double window_radius, RngStream& rng) {
  require_valid(cfg);
  if (window_radius <= 0.0)
    throw std::invalid_argument("realize_network: window radius must be positive");
  Deployment dep;
  dep.region_radius = window_radius;
  dep.abs_positions.reserve(static_cast<std::size_t>(cfg.N));
  for (int i = 0; i < cfg.N; ++i) {
    double rad = cfg.r_C * std::sqrt(rng.uniform());
    double ang = 2.0 * kPi * rng.uniform();
    dep.abs_positions.push_back({rad * std::cos(ang), rad * std::sin(ang), cfg.H});
  }
  long count = rng.poisson(cfg.lambda_TBS * kPi * window_radius * window_radius);
  dep.tbs_positions.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    double rad = window_radius * std::sqrt(rng.uniform());
    double ang = 2.0 * kPi * rng.uniform();
    dep.tbs_positions.push_back({rad * std::cos(ang), rad * std::sin(ang), 0.0});
  }
  return dep;
}

SirSample sir_at_user(const std::array<double, 3>& user, const Deployment& dep,
                      Policy policy, const NetworkConfig& cfg, RngStream& rng) {
  const std::size_t na = dep.abs_positions.size();
  const std::size_t nt = dep.tbs_positions.size();
  if (na + nt == 0) throw std::invalid_argument("sir_at_user: empty deployment");

  std::vector<Station> st;
  st.reserve(na + nt);
  for (std::size_t i = 0; i < na; ++i) {
    const auto& p = dep.abs_positions[i];
    double dx = p[0] - user[0], dy = p[1] - user[1], dz = p[2] - user[2];
    Station s;
    s.dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    s.alpha = cfg.alpha_ABS;
    s.m = cfg.m_ABS;
    s.state = LinkState::LoS;
    s.tier = Tier::ABS;
    s.index = static_cast<int>(i);
    s.power_lt = cfg.Omega * attenuation_power(s.dist, s.alpha);
    st.push_back(s);
  }
  for (std::size_t i = 0; i < nt; ++i) {
    const auto& p = dep.tbs_positions[i];
    double dx = p[0] - user[0], dy = p[1] - user[1], dz = p[2] - user[2];
    double horiz = std::sqrt(dx * dx + dy * dy);
    Station s;
    s.dist = std::sqrt(horiz * horiz + dz * dz);
    s.state = rng.uniform() < los_probability(horiz, std::abs(dz), cfg.env)
                  ? LinkState::LoS
                  : LinkState::NLoS;
    s.alpha = cfg.alpha(Tier::TBS, s.state);
    s.m = cfg.m(Tier::TBS, s.state);
    s.tier = Tier::TBS;
    s.index = static_cast<int>(i);
    s.power_lt = cfg.Omega * attenuation_power(s.dist, s.alpha);
    st.push_back(s);
  }

  // Indices into st for each tier, nearest first.
  std::vector<int> abs_idx(na), tbs_idx(nt);
  std::iota(abs_idx.begin(), abs_idx.end(), 0);
  std::iota(tbs_idx.begin(), tbs_idx.end(), static_cast<int>(na));
  auto nearer = [&](int a, int b) { return st[static_cast<std::size_t>(a)].dist < st[static_cast<std::size_t>(b)].dist; };
  std::size_t ka = std::min<std::size_t>(3, na);
  std::size_t kt = std::min<std::size_t>(3, nt);
  std::partial_sort(abs_idx.begin(), abs_idx.begin() + static_cast<long>(ka), abs_idx.end(), nearer);
  std::partial_sort(tbs_idx.begin(), tbs_idx.begin() + static_cast<long>(kt), tbs_idx.end(), nearer);

  std::vector<int> comp;
  if (policy == Policy::Comp3SameTier) {
    double v_abs = 0.0, v_tbs = 0.0;
    for (std::size_t i = 0; i < ka; ++i)
      v_abs += attenuation_amplitude(st[static_cast<std::size_t>(abs_idx[i])].dist, st[static_cast<std::size_t>(abs_idx[i])].alpha);
    for (std::size_t i = 0; i < kt; ++i)
      v_tbs += attenuation_amplitude(st[static_cast<std::size_t>(tbs_idx[i])].dist, st[static_cast<std::size_t>(tbs_idx[i])].alpha);
    const auto& chosen = v_abs >= v_tbs ? abs_idx : tbs_idx;
    std::size_t kc = v_abs >= v_tbs ? ka : kt;
    comp.assign(chosen.begin(), chosen.begin() + static_cast<long>(kc));
  } else {
    std::vector<int> all(na + nt);
    std::iota(all.begin(), all.end(), 0);
    std::size_t kc = policy == Policy::SingleNearest ? 1 : std::min<std::size_t>(3, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(kc), all.end(),
                      [&](int a, int b) { return st[static_cast<std::size_t>(a)].power_lt > st[static_cast<std::size_t>(b)].power_lt; });
    comp.assign(all.begin(), all.begin() + static_cast<long>(kc));
  }

  SirSample out;
  for (std::size_t i = 0; i < comp.size() && i < 3; ++i) {
    out.comp_set[i] = st[static_cast<std::size_t>(comp[i])].index;
    out.zeta[i] = st[static_cast<std::size_t>(comp[i])].state;
  }
  int strongest = comp[0];
  for (int c : comp)
    if (st[static_cast<std::size_t>(c)].power_lt > st[static_cast<std::size_t>(strongest)].power_lt) strongest = c;
  out.tier = st[static_cast<std::size_t>(strongest)].tier;

  std::vector<char> in_comp(na + nt, 0);
  for (int c : comp) in_comp[static_cast<std::size_t>(c)] = 1;

  double amplitude = 0.0;
  for (int c : comp) {
    const Station& s = st[static_cast<std::size_t>(c)];
    double fade = sample_nakagami_amplitude({s.m, cfg.Omega}, rng);
    amplitude += fade * attenuation_amplitude(s.dist, s.alpha);
  }
  double signal = amplitude * amplitude;

  double interference = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (in_comp[i]) continue;
    any = true;
    const Station& s = st[i];
    double g = rng.gamma(s.m, cfg.Omega / s.m);
    interference += g * attenuation_power(s.dist, s.alpha);
  }

  out.sir_linear = any ? signal / interference : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<CoverageReport> empirical_coverage_sweep(const NetworkConfig& cfg,
                                                     const std::vector<double>& gamma_db,
                                                     Policy policy, long trials,
                                                     std::uint64_t seed, int threads) {
  require_valid(cfg);
  if (gamma_db.empty())
    throw std::invalid_argument("empirical_coverage_sweep: empty threshold grid");
  if (trials < 1)
    throw std::invalid_argument("empirical_coverage_sweep: trials must be >= 1");

  NetworkConfig run_cfg = cfg;
  run_cfg.h = std::min(cfg.h, 300.0); // operational altitude cap
  const double window = default_window_radius(run_cfg);
  const std::size_t ng = gamma_db.size();
  std::vector<double> gamma_lin(ng);
  for (std::size_t i = 0; i < ng; ++i) gamma_lin[i] = db_to_linear(gamma_db[i]);

  const long blocks = (trials + kMcBlock - 1) / kMcBlock;
  struct Tally {
    std::vector<double> cov_abs, cov_tbs;
    double n_abs = 0.0, n_tbs = 0.0;
    Tally() = default;
  };
  std::vector<Tally> tallies(static_cast<std::size_t>(blocks));

  run_blocked(trials, threads, [&](long b, long first, long last) {
    RngStream rng(seed, kSimStreamBase + static_cast<std::uint64_t>(b));
    Tally tally;
    tally.cov_abs.assign(ng, 0.0);
    tally.cov_tbs.assign(ng, 0.0);
    const std::array<double, 3> user{0.0, 0.0, run_cfg.h};
    for (long t = first; t < last; ++t) {
      Deployment dep = realize_network(run_cfg, window, rng);
      SirSample s = sir_at_user(user, dep, policy, run_cfg, rng);
      auto& cov = s.tier == Tier::ABS ? tally.cov_abs : tally.cov_tbs;
      (s.tier == Tier::ABS ? tally.n_abs : tally.n_tbs) += 1.0;
      for (std::size_t gi = 0; gi < ng; ++gi)
        if (s.sir_linear >= gamma_lin[gi]) cov[gi] += 1.0;
    }
    tallies[static_cast<std::size_t>(b)] = std::move(tally);
  });

  auto col_sum = [&](const std::function<double(const Tally&)>& get) {
    std::vector<double> col(static_cast<std::size_t>(blocks));
    for (long b = 0; b < blocks; ++b) col[static_cast<std::size_t>(b)] = get(tallies[static_cast<std::size_t>(b)]);
    return pairwise_sum(col);
  };

  double n = static_cast<double>(trials);
  double n_abs = col_sum([](const Tally& t) { return t.n_abs; });
  double n_tbs = col_sum([](const Tally& t) { return t.n_tbs; });

  std::vector<CoverageReport> reports(ng);
  for (std::size_t gi = 0; gi < ng; ++gi) {
    double c_abs = col_sum([gi](const Tally& t) { return t.cov_abs[gi]; });
    double c_tbs = col_sum([gi](const Tally& t) { return t.cov_tbs[gi]; });
    CoverageReport& rep = reports[gi];
    rep.p_abs_cond = n_abs > 0.0 ? c_abs / n_abs : 0.0;
    rep.p_tbs_cond = n_tbs > 0.0 ? c_tbs / n_tbs : 0.0;
    rep.assoc.p_abs = n_abs / n;
    rep.assoc.p_tbs = n_tbs / n;
    rep.assoc.std_error = std::sqrt(std::max(0.0, rep.assoc.p_abs * rep.assoc.p_tbs / n));
    rep.assoc.method = "montecarlo";
    rep.p_total = rep.p_abs_cond * rep.assoc.p_abs + rep.p_tbs_cond * rep.assoc.p_tbs;
    rep.se_abs_cond = n_abs > 0.0 ? std::sqrt(std::max(0.0, rep.p_abs_cond * (1.0 - rep.p_abs_cond) / n_abs)) : 0.0;
    rep.se_tbs_cond = n_tbs > 0.0 ? std::sqrt(std::max(0.0, rep.p_tbs_cond * (1.0 - rep.p_tbs_cond) / n_tbs)) : 0.0;
    rep.gamma_db = gamma_db[gi];
    rep.method = "montecarlo";
    rep.trials = trials;
  }
  return reports;
}

CoverageReport empirical_coverage(const NetworkConfig& cfg, double gamma_db, Policy policy,
                                  long trials, std::uint64_t seed, int threads) {
  return empirical_coverage_sweep(cfg, {gamma_db}, policy, trials, seed, threads).front();
}

} // namespace vhcomp
