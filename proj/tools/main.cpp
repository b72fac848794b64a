// vhcomp: experiment runner for the two-tier aerial/terrestrial CoMP model.
// Subcommands reproduce the figure-class experiments (distance laws, Gamma
// fits, association sweeps, coverage curves, empirical simulation, placement
// optimization) and emit CSV/JSON/PGM artifacts, each with a manifest naming
// the config hash, seed and resolved parameters.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vhcomp/assoc.hpp"
#include "vhcomp/channel.hpp"
#include "vhcomp/config.hpp"
#include "vhcomp/coverage.hpp"
#include "vhcomp/deploy.hpp"
#include "vhcomp/dist.hpp"
#include "vhcomp/geometry.hpp"
#include "vhcomp/io.hpp"
#include "vhcomp/numerics.hpp"
#include "vhcomp/rng.hpp"
#include "vhcomp/sigstats.hpp"
#include "vhcomp/sim.hpp"

namespace {

using namespace vhcomp;

struct Common {
  std::string config_path;             // empty = built-in defaults
  std::vector<std::string> overrides;  // key=value applied to the config JSON
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 0;
};

// Applies key=value to the config JSON (boundary units: per-km^2 density,
// dB thresholds).  Dotted keys descend, e.g. env.b.
nlohmann::json apply_override(nlohmann::json j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must be key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);

  nlohmann::json* node = &j;
  std::size_t pos = 0;
  std::string last = key;
  for (std::size_t dot = key.find('.'); dot != std::string::npos;
       pos = dot + 1, dot = key.find('.', pos)) {
    const std::string part = key.substr(pos, dot - pos);
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = nlohmann::json::object();
    node = &(*node)[part];
    last = key.substr(dot + 1);
  }

  double num = 0.0;
  const auto res = std::from_chars(val.data(), val.data() + val.size(), num);
  if (res.ec == std::errc() && res.ptr == val.data() + val.size())
    (*node)[last] = num;
  else
    (*node)[last] = val;
  return j;
}

NetworkConfig resolve_config(const Common& c) {
  std::string text = c.config_path.empty() ? config_to_json(NetworkConfig{})
                                           : read_text_file(c.config_path);
  if (!c.overrides.empty()) {
    nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& kv : c.overrides) j = apply_override(std::move(j), kv);
    text = j.dump();
  }
  NetworkConfig cfg = config_from_json(text);
  require_valid(cfg);
  return cfg;
}

// Collects outputs and parameters for one subcommand run and writes
// <out_dir>/<subcommand>.manifest.json at the end.
struct RunContext {
  Common common;
  NetworkConfig cfg;
  ExperimentManifest mf;

  RunContext(const Common& c, const std::string& subcommand) : common(c) {
    cfg = resolve_config(c);
    std::filesystem::create_directories(common.out_dir);
    mf.subcommand = subcommand;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    mf.config_hash = hex;
    mf.seed = c.seed;
    mf.wall_clock_utc = iso8601_now_utc();
    param("config", c.config_path.empty() ? "<defaults>" : c.config_path);
    for (const auto& kv : c.overrides) param("set", kv);
    param("threads", std::to_string(resolve_thread_count(c.threads)));
    param("out_dir", c.out_dir);
  }

  void param(const std::string& k, const std::string& v) { mf.parameters.emplace_back(k, v); }
  void param(const std::string& k, double v) { param(k, format_double(v)); }
  void param(const std::string& k, long v) { param(k, std::to_string(v)); }
  void param(const std::string& k, int v) { param(k, std::to_string(v)); }

  std::string out(const std::string& name) {
    const std::string path = common.out_dir + "/" + name;
    mf.outputs.push_back(path);
    return path;
  }

  void finish() {
    write_manifest(common.out_dir + "/" + mf.subcommand + ".manifest.json", mf);
  }
};

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i)
    v[i] = steps == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(steps - 1);
  return v;
}

// ---------------------------------------------------------------- subcommands

void cmd_validate_dists(RunContext& ctx, long draws, int bins) {
  ctx.param("draws", draws);
  ctx.param("bins", bins);

  for (Tier tier : {Tier::ABS, Tier::TBS}) {
    RngStream rng(ctx.common.seed, tier == Tier::ABS ? 0x900000u : 0x910000u);
    std::vector<std::array<double, 3>> triples(draws);
    for (long i = 0; i < draws; ++i)
      triples[i] = tier == Tier::ABS ? sample_ordered_abs(ctx.cfg, rng)
                                     : sample_ordered_tbs(ctx.cfg, rng);

    for (int n = 1; n <= 3; ++n) {
      double lo, hi;
      if (tier == Tier::ABS) {
        lo = ctx.cfg.abs_gap();
        hi = ctx.cfg.r_max();
      } else {
        lo = ctx.cfg.h;
        hi = 0.0;
        for (const auto& t : triples) hi = std::max(hi, t[n - 1]);
        hi *= 1.0 + 1e-9;
      }
      std::vector<long> hist(bins, 0);
      const double width = (hi - lo) / bins;
      for (const auto& t : triples) {
        int b = static_cast<int>((t[n - 1] - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++hist[b];
      }
      std::vector<std::vector<double>> rows;
      for (int b = 0; b < bins; ++b) {
        const double r = lo + (b + 0.5) * width;
        const double pdf = tier == Tier::ABS ? pdf_abs_nth(r, n, ctx.cfg)
                                             : pdf_tbs_nth(r, n, ctx.cfg);
        rows.push_back({r, pdf, hist[b] / (width * draws)});
      }
      const std::string name = std::string("dist_") + (tier == Tier::ABS ? "abs" : "tbs") +
                               "_n" + std::to_string(n) + ".csv";
      write_csv(ctx.out(name), {"r", "pdf_analytic", "pdf_empirical"}, rows);
    }
  }
}

void cmd_fit_gamma(RunContext& ctx, long mc_draws) {
  ctx.param("mc_draws", mc_draws);
  MomentSpec spec;
  spec.seed = ctx.common.seed;
  spec.threads = ctx.common.threads;

  std::vector<std::vector<std::string>> rows;
  const LinkStateVector all_los{LinkState::LoS, LinkState::LoS, LinkState::LoS};

  // One empirical KS check of a fitted aggregate distribution.
  auto ks_of = [&](Tier tier, const LinkStateVector& zeta, bool fading,
                   const GammaFit& fit, std::uint64_t stream) {
    RngStream rng(ctx.common.seed, stream);
    std::vector<double> draws(mc_draws);
    for (long i = 0; i < mc_draws; ++i) {
      const std::array<double, 3> r = tier == Tier::ABS ? sample_ordered_abs(ctx.cfg, rng)
                                                        : sample_ordered_tbs(ctx.cfg, rng);
      double sum = 0.0;
      for (int nslot = 0; nslot < 3; ++nslot) {
        LinkState drawn = LinkState::LoS;
        if (tier == Tier::TBS) {
          const double z = std::sqrt(std::max(0.0, r[nslot] * r[nslot] - ctx.cfg.h * ctx.cfg.h));
          drawn = rng.uniform() < los_probability(z, ctx.cfg.h, ctx.cfg.env)
                      ? LinkState::LoS
                      : LinkState::NLoS;
        }
        if (drawn != zeta[nslot]) continue;
        const double att = std::pow(r[nslot], -ctx.cfg.alpha(tier, zeta[nslot]) / 2.0);
        if (fading) {
          const FadingParams fp = fading_params(ctx.cfg, tier, zeta[nslot]);
          sum += sample_nakagami_amplitude(fp, rng) * att;
        } else {
          sum += att;
        }
      }
      draws[i] = sum;
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (long i = 0; i < mc_draws; ++i) {
      const double f = reg_lower_gamma(fit.nu, draws[i] / fit.theta);
      ks = std::max(ks, std::abs(f - (i + 1.0) / mc_draws));
      ks = std::max(ks, std::abs(f - i / static_cast<double>(mc_draws)));
    }
    return ks;
  };

  auto add_rows = [&](Tier tier, const LinkStateVector& zeta, const SignalMoments& m,
                      std::uint64_t stream) {
    const std::string tname = tier_name(tier);
    const std::string zname = state_vector_name(zeta);
    try {
      const GammaFit fit_u = fit_gamma_U(m);
      rows.push_back({tname, zname, "U", format_double(fit_u.nu), format_double(fit_u.theta),
                      std::to_string(nu_tilde(fit_u.nu)), format_double(fit_u.theta),
                      format_double(ks_of(tier, zeta, true, fit_u, stream))});
      const GammaFit fit_v = fit_gamma_V(m);
      rows.push_back({tname, zname, "V", format_double(fit_v.nu), format_double(fit_v.theta),
                      std::to_string(nu_tilde(fit_v.nu)), format_double(fit_v.theta),
                      format_double(ks_of(tier, zeta, false, fit_v, stream + 1))});
    } catch (const std::domain_error&) {
      // state vector without mass under this environment; nothing to fit
    }
  };

  const SignalMoments m_abs = compute_moments(Tier::ABS, all_los, ctx.cfg, spec);
  add_rows(Tier::ABS, all_los, m_abs, 0x920000u);
  const std::array<SignalMoments, 8> m_tbs = compute_moments_all_tbs(ctx.cfg, spec);
  const auto zetas = all_state_vectors();
  for (int z = 0; z < 8; ++z) add_rows(Tier::TBS, zetas[z], m_tbs[z], 0x930000u + 2u * z);

  write_csv_text(ctx.out("gamma_fits.csv"),
                 {"tier", "zeta", "aggregate", "nu", "theta", "nu_rounded", "theta_rounded",
                  "ks_vs_empirical"},
                 rows);
}

void cmd_assoc_sweep(RunContext& ctx, double h_min, double h_max, int steps, long mc_users,
                     const std::string& placement, long moment_trials, long assoc_trials) {
  ctx.param("h_min", h_min);
  ctx.param("h_max", h_max);
  ctx.param("steps", steps);
  ctx.param("mc_users", mc_users);
  ctx.param("placement", placement);
  ctx.param("moment_trials", moment_trials);
  ctx.param("assoc_trials", assoc_trials);

  const UserPlacement up =
      placement == "center" ? UserPlacement::Center : UserPlacement::UniformRegion;

  std::vector<std::vector<double>> rows;
  for (double h : linspace(h_min, h_max, steps)) {
    NetworkConfig cfg = ctx.cfg;
    cfg.h = h;
    require_valid(cfg);
    AssocSpec spec;
    spec.moments.mc_trials = moment_trials;
    spec.moments.seed = ctx.common.seed;
    spec.moments.threads = ctx.common.threads;
    spec.trials = assoc_trials;
    spec.seed = ctx.common.seed;
    spec.placement = up;
    spec.threads = ctx.common.threads;
    const AssociationResult ana = assoc_prob_abs_analytic(cfg, spec);
    const AssocMcResult mc = assoc_prob_mc(cfg, mc_users, ctx.common.seed, up,
                                           ctx.common.threads);
    rows.push_back({h, ana.p_abs, mc.assoc.p_abs, mc.split.mixed});
  }
  write_csv(ctx.out("assoc_sweep.csv"), {"h", "p_abs_analytic", "p_abs_mc", "p_mixed"}, rows);
}

void cmd_regime(RunContext& ctx, double h_min, double h_max, int steps, long moment_trials,
                long assoc_trials, const std::string& placement) {
  ctx.param("h_min", h_min);
  ctx.param("h_max", h_max);
  ctx.param("steps", steps);
  ctx.param("moment_trials", moment_trials);
  ctx.param("assoc_trials", assoc_trials);
  ctx.param("placement", placement);

  AssocSpec spec;
  spec.moments.mc_trials = moment_trials;
  spec.moments.seed = ctx.common.seed;
  spec.moments.threads = ctx.common.threads;
  spec.trials = assoc_trials;
  spec.seed = ctx.common.seed;
  spec.placement =
      placement == "center" ? UserPlacement::Center : UserPlacement::UniformRegion;
  spec.threads = ctx.common.threads;

  const RegimeReport rep = regime_analysis(ctx.cfg, linspace(h_min, h_max, steps), spec);

  nlohmann::json j;
  j["h_grid"] = rep.h_grid;
  j["p_abs"] = rep.p_abs;
  j["h_threshold"] = rep.h_threshold;
  j["min_value"] = rep.min_value;
  j["u_shaped"] = rep.u_shaped;
  j["half_heights"] = rep.half_heights;
  j["classification"] = rep.classification;
  write_text_file(ctx.out("regime.json"), j.dump(2) + "\n");
}

void cmd_coverage_sweep(RunContext& ctx, double g_min, double g_max, int steps,
                        const std::string& vary, double x_min, double x_max,
                        double gamma_db, long mc_trials, long triple_trials,
                        int fields_per_triple, long assoc_trials) {
  ctx.param("gamma_db_min", g_min);
  ctx.param("gamma_db_max", g_max);
  ctx.param("steps", steps);
  ctx.param("vary", vary);
  ctx.param("mc_trials", mc_trials);
  ctx.param("triple_trials", triple_trials);
  ctx.param("fields_per_triple", fields_per_triple);
  ctx.param("assoc_trials", assoc_trials);

  CoverageSpec spec;
  spec.moments.seed = ctx.common.seed;
  spec.moments.threads = ctx.common.threads;
  spec.assoc_trials = assoc_trials;
  spec.triple_trials = triple_trials;
  spec.fields_per_triple = fields_per_triple;
  spec.seed = ctx.common.seed;
  spec.threads = ctx.common.threads;

  const std::vector<std::string> header = {"x",          "p_total_analytic", "p_total_mc",
                                           "p_abs_cond", "p_tbs_cond",       "assoc"};
  std::vector<std::vector<double>> rows;
  std::string name = "coverage_sweep.csv";

  if (vary == "gamma") {
    const std::vector<double> gammas = linspace(g_min, g_max, steps);
    const auto ana = coverage_analytic_sweep(ctx.cfg, gammas, spec);
    const auto mc = empirical_coverage_sweep(ctx.cfg, gammas, Policy::Comp3SameTier,
                                             mc_trials, ctx.common.seed, ctx.common.threads);
    for (int i = 0; i < steps; ++i)
      rows.push_back({gammas[i], ana[i].p_total, mc[i].p_total, ana[i].p_abs_cond,
                      ana[i].p_tbs_cond, ana[i].assoc.p_abs});
  } else {
    ctx.param("x_min", x_min);
    ctx.param("x_max", x_max);
    ctx.param("gamma_db", gamma_db);
    name = "coverage_vs_" + vary + ".csv";
    for (double x : linspace(x_min, x_max, steps)) {
      NetworkConfig cfg = ctx.cfg;
      if (vary == "h") cfg.h = x;
      else if (vary == "H") cfg.H = x;
      else if (vary == "N") cfg.N = static_cast<int>(std::lround(x));
      else throw std::invalid_argument("vary must be gamma, h, H or N");
      require_valid(cfg);
      const CoverageReport ana = coverage_analytic(cfg, gamma_db, spec);
      const CoverageReport mc = empirical_coverage(cfg, gamma_db, Policy::Comp3SameTier,
                                                   mc_trials, ctx.common.seed,
                                                   ctx.common.threads);
      rows.push_back({x, ana.p_total, mc.p_total, ana.p_abs_cond, ana.p_tbs_cond,
                      ana.assoc.p_abs});
    }
  }
  write_csv(ctx.out(name), header, rows);
}

nlohmann::json report_json(const CoverageReport& r) {
  nlohmann::json j;
  j["p_total"] = r.p_total;
  j["p_abs_cond"] = r.p_abs_cond;
  j["p_tbs_cond"] = r.p_tbs_cond;
  j["gamma_db"] = r.gamma_db;
  j["method"] = r.method;
  j["trials"] = r.trials;
  j["se_abs_cond"] = r.se_abs_cond;
  j["se_tbs_cond"] = r.se_tbs_cond;
  j["assoc"] = {{"p_abs", r.assoc.p_abs},
                {"p_tbs", r.assoc.p_tbs},
                {"std_error", r.assoc.std_error},
                {"method", r.assoc.method}};
  return j;
}

Policy parse_policy(const std::string& s) {
  if (s == "comp3") return Policy::Comp3SameTier;
  if (s == "single") return Policy::SingleNearest;
  if (s == "strongest3") return Policy::StrongestThree;
  throw std::invalid_argument("policy must be comp3, single or strongest3");
}

void cmd_simulate(RunContext& ctx, const std::string& policy, double gamma_db, long trials,
                  double g_min, double g_max, int steps) {
  ctx.param("policy", policy);
  ctx.param("trials", trials);
  const Policy p = parse_policy(policy);

  if (steps > 1) {
    ctx.param("gamma_db_min", g_min);
    ctx.param("gamma_db_max", g_max);
    ctx.param("steps", steps);
    const std::vector<double> gammas = linspace(g_min, g_max, steps);
    const auto reps = empirical_coverage_sweep(ctx.cfg, gammas, p, trials, ctx.common.seed,
                                               ctx.common.threads);
    std::vector<std::vector<double>> rows;
    for (const auto& r : reps)
      rows.push_back({r.gamma_db, r.p_total, r.p_abs_cond, r.p_tbs_cond, r.assoc.p_abs});
    write_csv(ctx.out("simulate_sweep.csv"),
              {"gamma_db", "p_total", "p_abs_cond", "p_tbs_cond", "p_abs"}, rows);
  } else {
    ctx.param("gamma_db", gamma_db);
    const CoverageReport rep = empirical_coverage(ctx.cfg, gamma_db, p, trials,
                                                  ctx.common.seed, ctx.common.threads);
    nlohmann::json j = report_json(rep);
    j["policy"] = policy;
    write_text_file(ctx.out("simulate.json"), j.dump(2) + "\n");
  }
}

void cmd_deploy_opt(RunContext& ctx, const std::string& weights_path, int k, double alpha,
                    double m, const std::string& strategy, double epsilon, int t_max) {
  ctx.param("weights", weights_path);
  ctx.param("k", k);
  ctx.param("alpha", alpha);
  ctx.param("m", m);
  ctx.param("strategy", strategy);
  ctx.param("epsilon", epsilon);
  ctx.param("t_max", t_max);

  const CsvTable table = read_csv(weights_path);
  if (table.header.size() != 3)
    throw std::invalid_argument("weights csv must have columns x,y,w");
  WeightedSamples samples;
  for (const auto& row : table.rows) {
    samples.points.push_back({row[0], row[1]});
    samples.weights.push_back(row[2]);
  }

  RngStream seeder(ctx.common.seed, 0xA00000u);
  const ClusterState init = kmeanspp_init(samples, k, seeder);
  ClusterState st;
  if (strategy == "fading-aware")
    st = fading_aware_kmeans(samples, k, alpha, m, epsilon, t_max, init);
  else if (strategy == "classical")
    st = classical_weighted_kmeans(samples, k, epsilon, t_max, init);
  else
    throw std::invalid_argument("strategy must be fading-aware or classical");

  std::vector<std::vector<double>> center_rows;
  for (const auto& c : st.centers) center_rows.push_back({c[0], c[1]});
  write_csv(ctx.out("deploy_centers.csv"), {"x", "y"}, center_rows);

  nlohmann::json j;
  j["strategy"] = strategy;
  j["k"] = k;
  j["objective"] = st.objective;
  j["iterations"] = st.iterations;
  j["converged"] = st.converged;
  j["centroid_decreases"] = st.centroid_decreases;
  j["degenerate_weights"] = st.degenerate_weights;
  write_text_file(ctx.out("deploy_state.json"), j.dump(2) + "\n");
}

void write_strategy_artifacts(RunContext& ctx, const StrategyComparison& cmp,
                              bool maps, bool aggregates) {
  const GridSpec& grid = cmp.grid;
  if (maps) {
    std::vector<std::vector<double>> wrows;
    for (std::size_t i = 0; i < cmp.weights.points.size(); ++i)
      wrows.push_back({cmp.weights.points[i][0], cmp.weights.points[i][1],
                       cmp.weights.weights[i]});
    write_csv(ctx.out("heatmap_weights.csv"), {"x", "y", "w"}, wrows);

    const auto pts = grid_points(grid);
    PgmExtents ext;
    ext.x_min = -grid.side / 2.0;
    ext.x_max = grid.side / 2.0;
    ext.y_min = -grid.side / 2.0;
    ext.y_max = grid.side / 2.0;
    ext.cells_x = grid.cells;
    ext.cells_y = grid.cells;
    for (const auto& s : cmp.strategies) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < pts.size(); ++i)
        rows.push_back({pts[i][0], pts[i][1], s.coverage[i]});
      write_csv(ctx.out("heatmap_" + s.name + ".csv"), {"x", "y", "coverage"}, rows);
      const std::string pgm = ctx.out("heatmap_" + s.name + ".pgm");
      ctx.mf.outputs.push_back(pgm + ".json"); // extents sidecar
      write_pgm_with_extents(pgm, s.coverage, ext);

      if (!s.abs_xy.empty()) {
        std::vector<std::vector<double>> crow;
        for (const auto& c : s.abs_xy) crow.push_back({c[0], c[1]});
        write_csv(ctx.out("centers_" + s.name + ".csv"), {"x", "y"}, crow);
      }
    }
  }
  if (aggregates) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : cmp.strategies)
      rows.push_back({s.name, format_double(s.aggregate)});
    write_csv_text(ctx.out("compare_strategies.csv"), {"strategy", "aggregate_coverage"},
                   rows);
  }
}

void cmd_heatmap(RunContext& ctx, int cells, double side, int k, double gamma_db,
                 long trials_per_cell, bool aggregates) {
  ctx.param("cells", cells);
  ctx.param("side", side);
  ctx.param("k", k);
  ctx.param("gamma_db", gamma_db);
  ctx.param("trials_per_cell", trials_per_cell);

  GridSpec grid;
  grid.side = side;
  grid.cells = cells;
  const StrategyComparison cmp = compare_strategies(ctx.cfg, grid, k, gamma_db,
                                                    trials_per_cell, ctx.common.seed,
                                                    ctx.common.threads);
  write_strategy_artifacts(ctx, cmp, true, aggregates);
}

void cmd_compare_strategies(RunContext& ctx, int cells, double side, int k, double gamma_db,
                            long trials_per_cell) {
  ctx.param("cells", cells);
  ctx.param("side", side);
  ctx.param("k", k);
  ctx.param("gamma_db", gamma_db);
  ctx.param("trials_per_cell", trials_per_cell);

  GridSpec grid;
  grid.side = side;
  grid.cells = cells;
  const StrategyComparison cmp = compare_strategies(ctx.cfg, grid, k, gamma_db,
                                                    trials_per_cell, ctx.common.seed,
                                                    ctx.common.threads);
  write_strategy_artifacts(ctx, cmp, false, true);
}

void cmd_repro_all(const Common& base, double trials_scale) {
  auto scaled = [&](long n) { return std::max(16L, std::lround(n * trials_scale)); };

  {
    RunContext ctx(base, "validate-dists");
    ctx.param("trials_scale", trials_scale);
    cmd_validate_dists(ctx, scaled(100000), 120);
    ctx.finish();
  }
  {
    RunContext ctx(base, "fit-gamma");
    cmd_fit_gamma(ctx, scaled(20000));
    ctx.finish();
  }
  {
    RunContext ctx(base, "assoc-sweep");
    cmd_assoc_sweep(ctx, 40.0, 300.0, 7, scaled(5000), "center", scaled(50000),
                    scaled(10000));
    ctx.finish();
  }
  {
    RunContext ctx(base, "regime");
    cmd_regime(ctx, 40.0, 300.0, 9, scaled(50000), scaled(10000), "region");
    ctx.finish();
  }
  {
    RunContext ctx(base, "coverage-sweep");
    cmd_coverage_sweep(ctx, -10.0, 10.0, 5, "gamma", 0.0, 0.0, 0.0, scaled(4000),
                       scaled(1500), 6, scaled(10000));
    ctx.finish();
  }
  {
    RunContext ctx(base, "simulate");
    cmd_simulate(ctx, "comp3", 0.0, scaled(5000), 0.0, 0.0, 1);
    ctx.finish();
  }
  {
    RunContext ctx(base, "heatmap");
    cmd_heatmap(ctx, 12, 1000.0, 4, 0.0, scaled(100), true);
    ctx.finish();
  }
  {
    RunContext ctx(base, "deploy-opt");
    cmd_deploy_opt(ctx, base.out_dir + "/heatmap_weights.csv", 4, ctx.cfg.alpha_ABS,
                   ctx.cfg.m_ABS, "fading-aware", 1e-3, 200);
    ctx.finish();
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier aerial/terrestrial CoMP coverage experiments"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--config", common.config_path, "Scenario JSON (omit for built-in defaults)");
  app.add_option("--set", common.overrides,
                 "Override a config field, key=value (repeatable; e.g. h=150, env=suburban)");
  app.add_option("--out-dir", common.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--threads", common.threads,
                 "Worker threads (0 = VHCOMP_THREADS env or hardware)")
      ->capture_default_str();

  // validate-dists
  long vd_draws = 100000;
  int vd_bins = 120;
  auto* vd = app.add_subcommand("validate-dists",
                                "Analytic vs empirical ordered distance laws (CSV per tier, n=1..3)");
  vd->add_option("--draws", vd_draws, "Empirical sample size")->capture_default_str();
  vd->add_option("--bins", vd_bins, "Histogram bins")->capture_default_str();

  // fit-gamma
  long fg_draws = 20000;
  auto* fg = app.add_subcommand("fit-gamma",
                                "Gamma fits of the aggregate signal per tier and state vector");
  fg->add_option("--mc-draws", fg_draws, "Draws for the KS check")->capture_default_str();

  // assoc-sweep
  double as_hmin = 30.0, as_hmax = 300.0;
  int as_steps = 10;
  long as_users = 20000, as_moments = 200000, as_trials = 20000;
  std::string as_place = "region";
  auto* as = app.add_subcommand("assoc-sweep", "Association probability vs user altitude");
  as->add_option("--h-min", as_hmin)->capture_default_str();
  as->add_option("--h-max", as_hmax)->capture_default_str();
  as->add_option("--steps", as_steps)->capture_default_str();
  as->add_option("--mc-users", as_users, "Monte Carlo users per altitude")->capture_default_str();
  as->add_option("--placement", as_place, "center | region")->capture_default_str();
  as->add_option("--moment-trials", as_moments)->capture_default_str();
  as->add_option("--assoc-trials", as_trials)->capture_default_str();

  // regime
  double rg_hmin = 30.0, rg_hmax = 300.0;
  int rg_steps = 14;
  long rg_moments = 200000, rg_trials = 20000;
  std::string rg_place = "region";
  auto* rg = app.add_subcommand("regime", "Altitude regime classification (JSON report)");
  rg->add_option("--h-min", rg_hmin)->capture_default_str();
  rg->add_option("--h-max", rg_hmax)->capture_default_str();
  rg->add_option("--steps", rg_steps)->capture_default_str();
  rg->add_option("--moment-trials", rg_moments)->capture_default_str();
  rg->add_option("--assoc-trials", rg_trials)->capture_default_str();
  rg->add_option("--placement", rg_place, "center | region")->capture_default_str();

  // coverage-sweep
  double cs_gmin = -10.0, cs_gmax = 10.0, cs_xmin = 0.0, cs_xmax = 0.0, cs_gamma = 0.0;
  int cs_steps = 11, cs_fields = 8;
  std::string cs_vary = "gamma";
  long cs_mc = 20000, cs_triples = 4000, cs_assoc = 20000;
  auto* cs = app.add_subcommand("coverage-sweep",
                                "Analytic and empirical coverage vs threshold (or h/H/N)");
  cs->add_option("--gamma-db-min", cs_gmin)->capture_default_str();
  cs->add_option("--gamma-db-max", cs_gmax)->capture_default_str();
  cs->add_option("--steps", cs_steps)->capture_default_str();
  cs->add_option("--vary", cs_vary, "gamma | h | H | N")->capture_default_str();
  cs->add_option("--x-min", cs_xmin, "Range of the varied parameter (vary != gamma)");
  cs->add_option("--x-max", cs_xmax);
  cs->add_option("--gamma-db", cs_gamma, "Fixed threshold when vary != gamma")
      ->capture_default_str();
  cs->add_option("--mc-trials", cs_mc)->capture_default_str();
  cs->add_option("--triple-trials", cs_triples)->capture_default_str();
  cs->add_option("--fields-per-triple", cs_fields)->capture_default_str();
  cs->add_option("--assoc-trials", cs_assoc)->capture_default_str();

  // simulate
  std::string sm_policy = "comp3";
  double sm_gamma = 0.0, sm_gmin = 0.0, sm_gmax = 0.0;
  int sm_steps = 1;
  long sm_trials = 20000;
  auto* sm = app.add_subcommand("simulate", "Empirical coverage (JSON; CSV when sweeping)");
  sm->add_option("--policy", sm_policy, "comp3 | single | strongest3")->capture_default_str();
  sm->add_option("--gamma-db", sm_gamma)->capture_default_str();
  sm->add_option("--trials", sm_trials)->capture_default_str();
  sm->add_option("--gamma-db-min", sm_gmin, "Sweep start (with --steps > 1)");
  sm->add_option("--gamma-db-max", sm_gmax);
  sm->add_option("--steps", sm_steps)->capture_default_str();

  // deploy-opt
  std::string du_weights, du_strategy = "fading-aware";
  int du_k = 8, du_tmax = 200;
  double du_alpha = -1.0, du_m = -1.0, du_eps = 1e-3;
  auto* du = app.add_subcommand("deploy-opt", "Cluster a weight map into aerial station centers");
  du->add_option("--weights", du_weights, "CSV with columns x,y,w")->required();
  du->add_option("--k", du_k)->capture_default_str();
  du->add_option("--alpha", du_alpha, "Kernel path loss exponent (default: config aerial)");
  du->add_option("--m", du_m, "Kernel fading shape (default: config aerial)");
  du->add_option("--strategy", du_strategy, "fading-aware | classical")->capture_default_str();
  du->add_option("--epsilon", du_eps)->capture_default_str();
  du->add_option("--t-max", du_tmax)->capture_default_str();

  // heatmap
  int hm_cells = 40, hm_k = 8;
  double hm_side = 1000.0, hm_gamma = 0.0;
  long hm_trials = 200;
  auto* hm = app.add_subcommand("heatmap",
                                "Coverage grids of the four placement strategies (CSV + PGM)");
  hm->add_option("--cells", hm_cells)->capture_default_str();
  hm->add_option("--side", hm_side)->capture_default_str();
  hm->add_option("--k", hm_k)->capture_default_str();
  hm->add_option("--gamma-db", hm_gamma)->capture_default_str();
  hm->add_option("--trials-per-cell", hm_trials)->capture_default_str();

  // compare-strategies
  int cp_cells = 40, cp_k = 8;
  double cp_side = 1000.0, cp_gamma = 0.0;
  long cp_trials = 200;
  auto* cp = app.add_subcommand("compare-strategies",
                                "Aggregate coverage of the four placement strategies");
  cp->add_option("--cells", cp_cells)->capture_default_str();
  cp->add_option("--side", cp_side)->capture_default_str();
  cp->add_option("--k", cp_k)->capture_default_str();
  cp->add_option("--gamma-db", cp_gamma)->capture_default_str();
  cp->add_option("--trials-per-cell", cp_trials)->capture_default_str();

  // repro-all
  double ra_scale = 1.0;
  auto* ra = app.add_subcommand("repro-all",
                                "Run every figure-class experiment into --out-dir");
  ra->add_option("--trials-scale", ra_scale, "Multiplier on every trial count")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (vd->parsed()) {
      RunContext ctx(common, "validate-dists");
      cmd_validate_dists(ctx, vd_draws, vd_bins);
      ctx.finish();
    } else if (fg->parsed()) {
      RunContext ctx(common, "fit-gamma");
      cmd_fit_gamma(ctx, fg_draws);
      ctx.finish();
    } else if (as->parsed()) {
      RunContext ctx(common, "assoc-sweep");
      cmd_assoc_sweep(ctx, as_hmin, as_hmax, as_steps, as_users, as_place, as_moments,
                      as_trials);
      ctx.finish();
    } else if (rg->parsed()) {
      RunContext ctx(common, "regime");
      cmd_regime(ctx, rg_hmin, rg_hmax, rg_steps, rg_moments, rg_trials, rg_place);
      ctx.finish();
    } else if (cs->parsed()) {
      RunContext ctx(common, "coverage-sweep");
      cmd_coverage_sweep(ctx, cs_gmin, cs_gmax, cs_steps, cs_vary, cs_xmin, cs_xmax,
                         cs_gamma, cs_mc, cs_triples, cs_fields, cs_assoc);
      ctx.finish();
    } else if (sm->parsed()) {
      RunContext ctx(common, "simulate");
      cmd_simulate(ctx, sm_policy, sm_gamma, sm_trials, sm_gmin, sm_gmax, sm_steps);
      ctx.finish();
    } else if (du->parsed()) {
      RunContext ctx(common, "deploy-opt");
      const double alpha = du_alpha > 0.0 ? du_alpha : ctx.cfg.alpha_ABS;
      const double m = du_m > 0.0 ? du_m : ctx.cfg.m_ABS;
      cmd_deploy_opt(ctx, du_weights, du_k, alpha, m, du_strategy, du_eps, du_tmax);
      ctx.finish();
    } else if (hm->parsed()) {
      RunContext ctx(common, "heatmap");
      cmd_heatmap(ctx, hm_cells, hm_side, hm_k, hm_gamma, hm_trials, false);
      ctx.finish();
    } else if (cp->parsed()) {
      RunContext ctx(common, "compare-strategies");
      cmd_compare_strategies(ctx, cp_cells, cp_side, cp_k, cp_gamma, cp_trials);
      ctx.finish();
    } else if (ra->parsed()) {
      cmd_repro_all(common, ra_scale);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
