// Coverage-aware placement: shortfall weight maps from the terrestrial CoMP
// SIR, the fading-aware clustering iteration with its kernel-weighted
// centroid step, a classical weighted K-means baseline, and the four-strategy
// grid comparison with per-tier Delaunay service maps.

#include "vhcomp/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "vhcomp/channel.hpp"
#include "vhcomp/geometry.hpp"
#include "vhcomp/numerics.hpp"

namespace vhcomp {

namespace {

constexpr std::uint64_t kWeightStreamBase = 0x500000;
constexpr std::uint64_t kMapStreamBase = 0x600000;
constexpr std::uint64_t kTbsRealizeStream = 0x700000;
constexpr std::uint64_t kRandomPlaceStream = 0x700001;
constexpr std::uint64_t kSeedStream = 0x700002;

// Mean SIR above this cap contributes no shortfall anywhere; keeps the
// no-interferer case finite.
constexpr double kSirCapDb = 50.0;

double dist_sq(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

// Nearest center, lowest index on ties.  The kernel is strictly decreasing in
// distance, so this is also the best-kernel assignment.
int nearest_center(const std::array<double, 2>& p,
                   const std::vector<std::array<double, 2>>& centers) {
  int best = 0;
  double best_d = dist_sq(p, centers[0]);
  for (std::size_t j = 1; j < centers.size(); ++j) {
    const double d = dist_sq(p, centers[j]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

void assign_all(const WeightedSamples& samples,
                const std::vector<std::array<double, 2>>& centers,
                std::vector<int>& assignment) {
  assignment.resize(samples.points.size());
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    assignment[i] = nearest_center(samples.points[i], centers);
}

void check_cluster_args(const WeightedSamples& samples, int k, double epsilon, int t_max,
                        const ClusterState& init) {
  if (samples.points.size() != samples.weights.size())
    throw std::invalid_argument("cluster samples: points/weights size mismatch");
  if (samples.points.empty()) throw std::invalid_argument("cluster samples empty");
  if (k < 1 || static_cast<std::size_t>(k) > samples.points.size())
    throw std::invalid_argument("cluster count out of range");
  if (init.centers.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("init centers do not match cluster count");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (t_max < 1) throw std::invalid_argument("t_max must be positive");
  for (double w : samples.weights)
    if (!(w >= 0.0)) throw std::invalid_argument("negative sample weight");
}

double total_weight(const WeightedSamples& samples) {
  return pairwise_sum(samples.weights);
}

// Moves every empty or weightless cluster onto the heaviest under-served
// sample point, then refreshes the assignment.  Returns true if anything
// moved.
bool reseed_empty_clusters(const WeightedSamples& samples,
                           std::vector<std::array<double, 2>>& centers,
                           std::vector<int>& assignment,
                           const std::function<double(double)>& miss_score) {
  const int k = static_cast<int>(centers.size());
  std::vector<double> mass(k, 0.0);
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    mass[assignment[i]] += samples.weights[i];

  std::vector<char> taken(samples.points.size(), 0);
  bool moved = false;
  for (int j = 0; j < k; ++j) {
    if (mass[j] > 0.0) continue;
    int pick = -1;
    double best = -1.0;
    for (std::size_t i = 0; i < samples.points.size(); ++i) {
      if (taken[i] || samples.weights[i] <= 0.0) continue;
      const double d = dist_sq(samples.points[i], centers[assignment[i]]);
      const double score = samples.weights[i] * miss_score(d);
      if (score > best) {
        best = score;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) continue; // nothing left worth serving
    centers[j] = samples.points[pick];
    taken[pick] = 1;
    moved = true;
  }
  if (moved) assign_all(samples, centers, assignment);
  return moved;
}

} // namespace

double deploy_kernel(double dist_sq_val, double alpha, double m) {
  const double da = std::pow(dist_sq_val, alpha / 2.0);
  return std::exp(-m * std::log1p(da / m));
}

double kernel_objective(const WeightedSamples& samples,
                        const std::vector<std::array<double, 2>>& centers, double alpha,
                        double m) {
  if (centers.empty()) return 0.0;
  std::vector<double> terms(samples.points.size());
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    const int j = nearest_center(samples.points[i], centers);
    terms[i] =
        samples.weights[i] * deploy_kernel(dist_sq(samples.points[i], centers[j]), alpha, m);
  }
  return pairwise_sum(terms);
}

WeightedSamples sir_gap_weights(const std::vector<std::array<double, 2>>& grid,
                                const Deployment& dep, const NetworkConfig& cfg,
                                long trials, std::uint64_t seed, int threads) {
  require_valid(cfg);
  if (trials < 1) throw std::invalid_argument("sir_gap_weights: trials must be positive");
  if (dep.abs_positions.empty() && dep.tbs_positions.empty())
    throw std::invalid_argument("sir_gap_weights: empty deployment");

  const double threshold_db = linear_to_db(cfg.gamma_TBS);
  WeightedSamples out;
  out.points = grid;
  out.weights.assign(grid.size(), 0.0);

  run_blocked(static_cast<long>(grid.size()), threads, [&](long, long lo, long hi) {
    for (long c = lo; c < hi; ++c) {
      RngStream rng(seed, kWeightStreamBase + static_cast<std::uint64_t>(c));
      const std::array<double, 3> user{grid[c][0], grid[c][1], cfg.h};
      std::vector<double> db(trials);
      for (long t = 0; t < trials; ++t) {
        const SirSample s = sir_at_user(user, dep, Policy::Comp3SameTier, cfg, rng);
        db[t] = std::isinf(s.sir_linear) ? kSirCapDb
                                         : std::min(kSirCapDb, linear_to_db(s.sir_linear));
      }
      const double mean_db = pairwise_sum(db) / static_cast<double>(trials);
      out.weights[c] = std::max(0.0, threshold_db - mean_db);
    }
  });
  return out;
}

ClusterState kmeanspp_init(const WeightedSamples& samples, int k, RngStream& rng) {
  if (samples.points.size() != samples.weights.size())
    throw std::invalid_argument("cluster samples: points/weights size mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > samples.points.size())
    throw std::invalid_argument("cluster count out of range");

  const std::size_t n = samples.points.size();
  const bool flat = !(total_weight(samples) > 0.0);

  auto draw_index = [&](const std::vector<double>& score) {
    double total = pairwise_sum(score);
    if (!(total > 0.0)) return static_cast<std::size_t>(rng.uniform() * n) % n;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < score.size(); ++i) {
      u -= score[i];
      if (u <= 0.0) return i;
    }
    return score.size() - 1;
  };

  ClusterState st;
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = flat ? 1.0 : samples.weights[i];
  st.centers.push_back(samples.points[draw_index(score)]);

  std::vector<double> best_d(n);
  while (st.centers.size() < static_cast<std::size_t>(k)) {
    for (std::size_t i = 0; i < n; ++i) {
      best_d[i] = dist_sq(samples.points[i], st.centers[0]);
      for (std::size_t j = 1; j < st.centers.size(); ++j)
        best_d[i] = std::min(best_d[i], dist_sq(samples.points[i], st.centers[j]));
      score[i] = (flat ? 1.0 : samples.weights[i]) * best_d[i];
    }
    st.centers.push_back(samples.points[draw_index(score)]);
  }
  assign_all(samples, st.centers, st.assignment);
  return st;
}

ClusterState fading_aware_kmeans(const WeightedSamples& samples, int k, double alpha,
                                 double m, double epsilon, int t_max, ClusterState init) {
  check_cluster_args(samples, k, epsilon, t_max, init);
  if (!(alpha > 0.0) || !(m > 0.0))
    throw std::invalid_argument("kernel parameters must be positive");

  ClusterState st = std::move(init);
  assign_all(samples, st.centers, st.assignment);
  if (!(total_weight(samples) > 0.0)) {
    st.degenerate_weights = true;
    st.objective = 0.0;
    return st;
  }

  auto miss = [&](double d) { return 1.0 - deploy_kernel(d, alpha, m); };
  reseed_empty_clusters(samples, st.centers, st.assignment, miss);
  st.objective = kernel_objective(samples, st.centers, alpha, m);

  ClusterState best = st;
  for (int t = 0; t < t_max; ++t) {
    // Kernel-weighted centroid, kernel frozen at the pre-update center.
    std::vector<std::array<double, 2>> next = st.centers;
    std::vector<double> num_x(k, 0.0), num_y(k, 0.0), den(k, 0.0);
    for (std::size_t i = 0; i < samples.points.size(); ++i) {
      const int j = st.assignment[i];
      const double wk = samples.weights[i] *
                        deploy_kernel(dist_sq(samples.points[i], st.centers[j]), alpha, m);
      num_x[j] += wk * samples.points[i][0];
      num_y[j] += wk * samples.points[i][1];
      den[j] += wk;
    }
    double move = 0.0;
    for (int j = 0; j < k; ++j) {
      if (!(den[j] > 0.0)) continue;
      next[j] = {num_x[j] / den[j], num_y[j] / den[j]};
      move = std::max(move, std::sqrt(dist_sq(next[j], st.centers[j])));
    }

    const double prev_obj = st.objective;
    st.centers = std::move(next);
    assign_all(samples, st.centers, st.assignment);
    reseed_empty_clusters(samples, st.centers, st.assignment, miss);
    st.objective = kernel_objective(samples, st.centers, alpha, m);
    st.iterations = t + 1;
    if (st.objective < prev_obj - 1e-12 * std::max(1.0, std::abs(prev_obj)))
      ++st.centroid_decreases;
    if (st.objective > best.objective) {
      best = st;
      best.iterations = st.iterations;
    }
    if (move < epsilon) {
      st.converged = true;
      break;
    }
  }

  best.iterations = st.iterations;
  best.converged = st.converged;
  best.centroid_decreases = st.centroid_decreases;
  return best;
}

ClusterState classical_weighted_kmeans(const WeightedSamples& samples, int k,
                                       double epsilon, int t_max, ClusterState init) {
  check_cluster_args(samples, k, epsilon, t_max, init);

  ClusterState st = std::move(init);
  assign_all(samples, st.centers, st.assignment);
  if (!(total_weight(samples) > 0.0)) {
    st.degenerate_weights = true;
    st.objective = 0.0;
    return st;
  }

  auto sse = [&]() {
    std::vector<double> terms(samples.points.size());
    for (std::size_t i = 0; i < samples.points.size(); ++i)
      terms[i] =
          samples.weights[i] * dist_sq(samples.points[i], st.centers[st.assignment[i]]);
    return pairwise_sum(terms);
  };
  auto miss = [](double d) { return d; };
  reseed_empty_clusters(samples, st.centers, st.assignment, miss);
  st.objective = sse();

  ClusterState best = st;
  for (int t = 0; t < t_max; ++t) {
    std::vector<double> num_x(k, 0.0), num_y(k, 0.0), den(k, 0.0);
    for (std::size_t i = 0; i < samples.points.size(); ++i) {
      const int j = st.assignment[i];
      num_x[j] += samples.weights[i] * samples.points[i][0];
      num_y[j] += samples.weights[i] * samples.points[i][1];
      den[j] += samples.weights[i];
    }
    double move = 0.0;
    for (int j = 0; j < k; ++j) {
      if (!(den[j] > 0.0)) continue;
      const std::array<double, 2> c{num_x[j] / den[j], num_y[j] / den[j]};
      move = std::max(move, std::sqrt(dist_sq(c, st.centers[j])));
      st.centers[j] = c;
    }
    assign_all(samples, st.centers, st.assignment);
    reseed_empty_clusters(samples, st.centers, st.assignment, miss);
    st.objective = sse();
    st.iterations = t + 1;
    if (st.objective < best.objective) best = st;
    if (move < epsilon) {
      st.converged = true;
      break;
    }
  }

  best.iterations = st.iterations;
  best.converged = st.converged;
  return best;
}

std::vector<std::array<double, 2>> grid_points(const GridSpec& grid) {
  if (grid.cells < 1 || !(grid.side > 0.0))
    throw std::invalid_argument("grid spec out of range");
  std::vector<std::array<double, 2>> pts;
  pts.reserve(static_cast<std::size_t>(grid.cells) * grid.cells);
  const double step = grid.side / grid.cells;
  for (int iy = 0; iy < grid.cells; ++iy)
    for (int ix = 0; ix < grid.cells; ++ix)
      pts.push_back({-grid.side / 2.0 + (ix + 0.5) * step,
                     -grid.side / 2.0 + (iy + 0.5) * step});
  return pts;
}

namespace {

// Service map of one tier: the Delaunay triangle containing the user names
// the cooperating trio.  With fewer than three stations (or a degenerate
// point set) every station of the tier cooperates.
struct TierMap {
  std::vector<std::array<double, 3>> const* stations = nullptr;
  Triangulation tri;
  bool use_tri = false;

  void build(const std::vector<std::array<double, 3>>& pos) {
    stations = &pos;
    use_tri = false;
    if (pos.size() < 3) return;
    std::vector<std::array<double, 2>> xy(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) xy[i] = {pos[i][0], pos[i][1]};
    try {
      tri = delaunay(xy);
      use_tri = true;
    } catch (const std::invalid_argument&) {
      // duplicates or all collinear; fall back to the whole tier
    }
  }

  // Indices of the cooperating stations for a user at p.
  std::vector<int> trio(const std::array<double, 2>& p) const {
    std::vector<int> out;
    if (use_tri) {
      const std::array<int, 3> t = comp_cluster_for_user(p, tri);
      out.assign(t.begin(), t.end());
    } else {
      for (std::size_t i = 0; i < stations->size(); ++i) out.push_back(static_cast<int>(i));
    }
    return out;
  }
};

} // namespace

std::vector<double> strategy_coverage_map(const NetworkConfig& cfg, const Deployment& dep,
                                          const GridSpec& grid, double gamma_db,
                                          long trials_per_cell, std::uint64_t seed,
                                          int threads) {
  require_valid(cfg);
  if (trials_per_cell < 1) throw std::invalid_argument("trials_per_cell must be positive");
  if (dep.tbs_positions.empty() && dep.abs_positions.empty())
    throw std::invalid_argument("coverage map: empty deployment");

  const std::vector<std::array<double, 2>> pts = grid_points(grid);
  const double gamma_lin = db_to_linear(gamma_db);
  const std::size_t n_tbs = dep.tbs_positions.size();
  const std::size_t n_abs = dep.abs_positions.size();

  TierMap abs_map, tbs_map;
  abs_map.build(dep.abs_positions);
  tbs_map.build(dep.tbs_positions);

  std::vector<double> cov(pts.size(), 0.0);
  run_blocked(static_cast<long>(pts.size()), threads, [&](long, long lo, long hi) {
    for (long c = lo; c < hi; ++c) {
      RngStream rng(seed, kMapStreamBase + static_cast<std::uint64_t>(c));
      const std::array<double, 2> p = pts[c];
      const std::array<double, 3> user{p[0], p[1], cfg.h};

      const std::vector<int> abs_trio = n_abs ? abs_map.trio(p) : std::vector<int>{};
      const std::vector<int> tbs_trio = n_tbs ? tbs_map.trio(p) : std::vector<int>{};

      std::vector<double> d_abs(n_abs), d_tbs(n_tbs);
      for (std::size_t i = 0; i < n_abs; ++i) {
        const auto& s = dep.abs_positions[i];
        const double dx = s[0] - user[0], dy = s[1] - user[1], dz = s[2] - user[2];
        d_abs[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
      }
      for (std::size_t i = 0; i < n_tbs; ++i) {
        const auto& s = dep.tbs_positions[i];
        const double dx = s[0] - user[0], dy = s[1] - user[1], dz = s[2] - user[2];
        d_tbs[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
      }

      long hits = 0;
      std::vector<LinkState> tbs_state(n_tbs);
      for (long t = 0; t < trials_per_cell; ++t) {
        for (std::size_t i = 0; i < n_tbs; ++i) {
          const auto& s = dep.tbs_positions[i];
          const double dx = s[0] - user[0], dy = s[1] - user[1];
          const double pl =
              los_probability(std::sqrt(dx * dx + dy * dy), user[2], cfg.env);
          tbs_state[i] = rng.uniform() < pl ? LinkState::LoS : LinkState::NLoS;
        }

        // Long-term aggregate amplitude of each tier's trio decides service.
        double v_abs = 0.0, v_tbs = 0.0;
        for (int i : abs_trio) {
          const FadingParams fp = fading_params(cfg, Tier::ABS, LinkState::LoS);
          v_abs += fading_first_moment(fp.m, fp.omega) *
                   std::pow(d_abs[i], -cfg.alpha_ABS / 2.0);
        }
        for (int i : tbs_trio) {
          const FadingParams fp = fading_params(cfg, Tier::TBS, tbs_state[i]);
          v_tbs += fading_first_moment(fp.m, fp.omega) *
                   std::pow(d_tbs[i], -cfg.alpha(Tier::TBS, tbs_state[i]) / 2.0);
        }
        const bool serve_abs = n_abs && (!n_tbs || v_abs >= v_tbs);
        const std::vector<int>& trio = serve_abs ? abs_trio : tbs_trio;

        double amp = 0.0;
        for (int i : trio) {
          const Tier tier = serve_abs ? Tier::ABS : Tier::TBS;
          const LinkState zs = serve_abs ? LinkState::LoS : tbs_state[i];
          const FadingParams fp = fading_params(cfg, tier, zs);
          const double d = serve_abs ? d_abs[i] : d_tbs[i];
          amp += sample_nakagami_amplitude(fp, rng) * std::pow(d, -cfg.alpha(tier, zs) / 2.0);
        }
        const double signal = amp * amp;

        double interference = 0.0;
        for (std::size_t i = 0; i < n_abs; ++i) {
          if (serve_abs &&
              std::find(trio.begin(), trio.end(), static_cast<int>(i)) != trio.end())
            continue;
          const FadingParams fp = fading_params(cfg, Tier::ABS, LinkState::LoS);
          interference += rng.gamma(fp.m, fp.omega / fp.m) * std::pow(d_abs[i], -cfg.alpha_ABS);
        }
        for (std::size_t i = 0; i < n_tbs; ++i) {
          if (!serve_abs &&
              std::find(trio.begin(), trio.end(), static_cast<int>(i)) != trio.end())
            continue;
          const FadingParams fp = fading_params(cfg, Tier::TBS, tbs_state[i]);
          interference += rng.gamma(fp.m, fp.omega / fp.m) *
                          std::pow(d_tbs[i], -cfg.alpha(Tier::TBS, tbs_state[i]));
        }

        const bool covered = interference > 0.0 ? signal / interference >= gamma_lin : true;
        if (covered) ++hits;
      }
      cov[c] = static_cast<double>(hits) / static_cast<double>(trials_per_cell);
    }
  });
  return cov;
}

StrategyComparison compare_strategies(const NetworkConfig& cfg, const GridSpec& grid, int k,
                                      double gamma_db, long trials_per_cell,
                                      std::uint64_t seed, int threads) {
  require_valid(cfg);
  if (k < 0) throw std::invalid_argument("aerial station count must be non-negative");

  StrategyComparison out;
  out.grid = grid;

  // One terrestrial realization shared by all strategies, limited to the
  // region so the edge effects of the comparison match the service maps.
  RngStream realize(seed, kTbsRealizeStream);
  Deployment tbs_only;
  tbs_only.region_radius = grid.side / 2.0;
  const long n_tbs = realize.poisson(cfg.lambda_TBS * grid.side * grid.side);
  for (long i = 0; i < n_tbs; ++i) {
    const double x = realize.uniform(-grid.side / 2.0, grid.side / 2.0);
    const double y = realize.uniform(-grid.side / 2.0, grid.side / 2.0);
    tbs_only.tbs_positions.push_back({x, y, 0.0});
  }
  out.tbs_xy.reserve(tbs_only.tbs_positions.size());
  for (const auto& s : tbs_only.tbs_positions) out.tbs_xy.push_back({s[0], s[1]});

  const std::vector<std::array<double, 2>> pts = grid_points(grid);
  out.weights = sir_gap_weights(pts, tbs_only, cfg, trials_per_cell, seed, threads);

  auto run_strategy = [&](const std::string& name,
                          const std::vector<std::array<double, 2>>& abs_xy) {
    Deployment dep = tbs_only;
    for (const auto& c : abs_xy) dep.abs_positions.push_back({c[0], c[1], cfg.H});
    StrategyResult res;
    res.name = name;
    res.abs_xy = abs_xy;
    res.coverage =
        strategy_coverage_map(cfg, dep, grid, gamma_db, trials_per_cell, seed, threads);
    res.aggregate = pairwise_sum(res.coverage) / static_cast<double>(res.coverage.size());
    out.strategies.push_back(std::move(res));
  };

  run_strategy("tbs-only", {});

  std::vector<std::array<double, 2>> random_xy;
  RngStream place(seed, kRandomPlaceStream);
  for (int i = 0; i < k; ++i)
    random_xy.push_back({place.uniform(-grid.side / 2.0, grid.side / 2.0),
                         place.uniform(-grid.side / 2.0, grid.side / 2.0)});
  run_strategy("random", random_xy);

  if (k > 0) {
    RngStream seeder(seed, kSeedStream);
    const ClusterState init = kmeanspp_init(out.weights, k, seeder);
    const ClusterState classical =
        classical_weighted_kmeans(out.weights, k, 1e-3, 200, init);
    const ClusterState aware = fading_aware_kmeans(out.weights, k, cfg.alpha_ABS,
                                                   cfg.m_ABS, 1e-3, 200, init);
    run_strategy("classical-kmeans", classical.centers);
    run_strategy("fading-aware", aware.centers);
  } else {
    run_strategy("classical-kmeans", {});
    run_strategy("fading-aware", {});
  }
  return out;
}

} // namespace vhcomp
