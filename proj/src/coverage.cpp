// Coverage probability evaluation.  The serving-distance expectation runs on
// rejection-sampled conditional triples, the interference expectation on
// simulated fields with the exact exclusion geometry, and the per-draw
// coverage term is the Erlang survival series of the fitted aggregate.

#include "vhcomp/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vhcomp/channel.hpp"

namespace vhcomp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream offsets keeping the sub-estimators of one seed apart.
constexpr std::uint64_t kNormalizerBase = 0x200000;
constexpr std::uint64_t kAssocBase = 0x300000;
constexpr std::uint64_t kAbsTripleBase = 0x310000;
constexpr std::uint64_t kTbsTripleBase = 0x320000;
constexpr std::uint64_t kMomentBase = 0x340000;

void check_ordered(const std::array<double, 3>& r, const char* who) {
  if (!(r[0] <= r[1] && r[1] <= r[2]))
    throw std::invalid_argument(std::string(who) + ": triple must be ordered");
}

// 1 - (1 + x)^(-m) without cancellation for small x.
double one_minus_pow(double x, double m) { return -std::expm1(-m * std::log1p(x)); }

double pow_neg_m(double x, double m) { return std::exp(-m * std::log1p(x)); }

struct ExclusionGeometry {
  double l1_sq; // terrestrial horizontal exclusion, squared
  double l2_sq; // aerial horizontal exclusion, squared
  int abs_interferers;
};

ExclusionGeometry exclusion_geometry(Tier serving, double r3, const NetworkConfig& cfg) {
  const double gap = cfg.abs_gap();
  ExclusionGeometry g{};
  if (serving == Tier::ABS) {
    if (r3 < gap * (1.0 - 1e-12) || r3 > cfg.r_max() * (1.0 + 1e-12))
      throw std::invalid_argument("exclusion geometry: r3 outside the aerial support");
    g.l1_sq = 0.0;
    g.l2_sq = std::clamp(r3 * r3 - gap * gap, 0.0, cfg.r_C * cfg.r_C);
    g.abs_interferers = cfg.N - 3;
  } else {
    if (r3 < cfg.h * (1.0 - 1e-12))
      throw std::invalid_argument("exclusion geometry: r3 below the terrestrial support");
    g.l1_sq = std::max(0.0, r3 * r3 - cfg.h * cfg.h);
    g.l2_sq = 0.0;
    g.abs_interferers = cfg.N;
  }
  return g;
}

} // namespace

double joint_ccdf_tbs(const std::array<double, 3>& r, const NetworkConfig& cfg) {
  check_ordered(r, "joint_ccdf_tbs");
  auto mass = [&](double ri) {
    return kPi * cfg.lambda_TBS * std::max(0.0, ri * ri - cfg.h * cfg.h);
  };
  double a1 = mass(r[0]), a2 = mass(r[1]), a3 = mass(r[2]);
  double d12 = a2 - a1, d23 = a3 - a2;
  // Nested Poisson counts: zero inside r1, at most one more inside r2, at
  // most two total inside r3.
  double inner = (1.0 + d23 + 0.5 * d23 * d23) + d12 * (1.0 + d23);
  return std::exp(-a3) * inner;
}

double joint_ccdf_abs(const std::array<double, 3>& r, const NetworkConfig& cfg) {
  check_ordered(r, "joint_ccdf_abs");
  const double gap = cfg.abs_gap();
  auto frac = [&](double ri) {
    return std::clamp((ri * ri - gap * gap) / (cfg.r_C * cfg.r_C), 0.0, 1.0);
  };
  double p1 = frac(r[0]), p2 = frac(r[1]), p3 = frac(r[2]);
  double q12 = p2 - p1, q23 = p3 - p2, tail = 1.0 - p3;
  double n = static_cast<double>(cfg.N);
  // Multinomial occupancy of the rings (0,r1], (r1,r2], (r2,r3], beyond.
  double t_nm3 = std::pow(tail, n - 3.0);
  double acc = t_nm3 * tail * tail * tail;                       // (0,0)
  acc += n * q23 * t_nm3 * tail * tail;                          // (0,1)
  acc += 0.5 * n * (n - 1.0) * q23 * q23 * t_nm3 * tail;         // (0,2)
  acc += n * q12 * t_nm3 * tail * tail;                          // (1,0)
  acc += n * (n - 1.0) * q12 * q23 * t_nm3 * tail;               // (1,1)
  return acc;
}

ConditionalDistanceLaw conditional_law(Tier tier, const NetworkConfig& cfg, long trials,
                                       std::uint64_t seed, int threads) {
  require_valid(cfg);
  ConditionalDistanceLaw law;
  law.tier = tier;
  if (tier == Tier::ABS) {
    law.ccdf_other_tier = [cfg](const std::array<double, 3>& r) {
      return joint_ccdf_tbs(r, cfg);
    };
    law.normalizer = blocked_mc_mean(trials, seed, kNormalizerBase, threads,
                                     [&cfg](RngStream& rng) {
                                       return joint_ccdf_tbs(sample_ordered_abs(cfg, rng), cfg);
                                     })
                         .mean;
  } else {
    law.ccdf_other_tier = [cfg](const std::array<double, 3>& r) {
      return joint_ccdf_abs(r, cfg);
    };
    law.normalizer = blocked_mc_mean(trials, seed, kNormalizerBase, threads,
                                     [&cfg](RngStream& rng) {
                                       return joint_ccdf_abs(sample_ordered_tbs(cfg, rng), cfg);
                                     })
                         .mean;
  }
  return law;
}

OrderedDistances conditional_sample(Tier tier, const NetworkConfig& cfg, RngStream& rng) {
  const int kMaxAttempts = 20000; // ~1e-3 acceptance still passes easily
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::array<double, 3> r =
        tier == Tier::ABS ? sample_ordered_abs(cfg, rng) : sample_ordered_tbs(cfg, rng);
    double accept = tier == Tier::ABS ? joint_ccdf_tbs(r, cfg) : joint_ccdf_abs(r, cfg);
    if (rng.uniform() < accept) return OrderedDistances{r, tier};
  }
  throw std::runtime_error(
      "conditional_sample: acceptance rate below 1e-3; the other tier "
      "dominates this configuration almost surely");
}

double laplace_interference(double u, double r3, Tier tier, const NetworkConfig& cfg,
                            const QuadratureSpec& spec) {
  require_valid(cfg);
  if (u < 0.0) throw std::invalid_argument("laplace_interference: u must be >= 0");
  ExclusionGeometry geo = exclusion_geometry(tier, r3, cfg);
  if (u == 0.0) return 1.0;

  const double h_sq = cfg.h * cfg.h;
  double j_sum = 0.0;
  for (LinkState s : {LinkState::LoS, LinkState::NLoS}) {
    const double alpha = cfg.alpha(Tier::TBS, s);
    const double m = cfg.m(Tier::TBS, s);
    auto integrand = [&](double t) {
      double pl = los_probability(std::sqrt(t), cfg.h, cfg.env);
      double w = s == LinkState::LoS ? pl : 1.0 - pl;
      if (w <= 0.0) return 0.0;
      double x = u * cfg.Omega * std::pow(t + h_sq, -0.5 * alpha) / m;
      return w * one_minus_pow(x, m);
    };
    QuadResult q = integrate_1d(integrand, geo.l1_sq,
                                std::numeric_limits<double>::infinity(), spec);
    if (!q.converged)
      throw std::runtime_error("laplace_interference: terrestrial integral did not converge");
    j_sum += q.value;
  }
  double tbs_factor = std::exp(-kPi * cfg.lambda_TBS * j_sum);

  const double gap_sq = cfg.abs_gap() * cfg.abs_gap();
  const double m_abs = cfg.m_ABS;
  const double alpha_abs = cfg.alpha_ABS;
  auto abs_kernel = [&](double t) {
    double x = u * cfg.Omega * std::pow(t + gap_sq, -0.5 * alpha_abs) / m_abs;
    return pow_neg_m(x, m_abs);
  };
  double span = cfg.r_C * cfg.r_C - geo.l2_sq;
  double bracket;
  if (span <= 1e-9 * cfg.r_C * cfg.r_C) {
    bracket = abs_kernel(cfg.r_C * cfg.r_C); // annulus shrank to the rim
  } else {
    QuadResult q = integrate_1d(abs_kernel, geo.l2_sq, cfg.r_C * cfg.r_C, spec);
    if (!q.converged)
      throw std::runtime_error("laplace_interference: aerial integral did not converge");
    bracket = q.value / span;
  }
  return tbs_factor * std::pow(bracket, static_cast<double>(geo.abs_interferers));
}

double laplace_sqrt_interference(double s, double r3, Tier tier, const NetworkConfig& cfg,
                                 const QuadratureSpec& spec) {
  if (s < 0.0) throw std::invalid_argument("laplace_sqrt_interference: s must be >= 0");
  exclusion_geometry(tier, r3, cfg); // validate r3 up front
  if (s == 0.0) return 1.0;
  // Gaussian-kernel form: substituting t = s / (2 sqrt(u)) turns the kernel
  // integral into (2/sqrt(pi)) * int_0^inf exp(-t^2) L_I(s^2/(4 t^2)) dt.
  auto integrand = [&](double t) {
    double u = s * s / (4.0 * t * t);
    return std::exp(-t * t) * laplace_interference(u, r3, tier, cfg, spec);
  };
  QuadResult q = integrate_1d(integrand, 0.0, 8.0, spec);
  if (!q.converged)
    throw std::runtime_error("laplace_sqrt_interference: kernel integral did not converge");
  return std::clamp(2.0 / std::sqrt(kPi) * q.value, 0.0, 1.0);
}

double default_window_radius(const NetworkConfig& cfg) {
  return std::max(5.0 / std::sqrt(kPi * cfg.lambda_TBS), 3.0 * cfg.r_C);
}

double window_tail_fraction(const NetworkConfig& cfg, double window_radius) {
  require_valid(cfg);
  if (window_radius <= cfg.r_C)
    throw std::invalid_argument("window_tail_fraction: window must cover the aerial disk");
  const double h_sq = cfg.h * cfg.h;
  auto mean_density = [&](double t) {
    double pl = los_probability(std::sqrt(t), cfg.h, cfg.env);
    double los = pl * std::pow(t + h_sq, -0.5 * cfg.alpha_TBS_L);
    double nlos = (1.0 - pl) * std::pow(t + h_sq, -0.5 * cfg.alpha_TBS_N);
    return los + nlos;
  };
  double w_sq = window_radius * window_radius;
  QuadratureSpec spec;
  double inside = kPi * cfg.lambda_TBS * cfg.Omega *
                  integrate_1d(mean_density, 0.0, w_sq, spec).value;
  double outside = kPi * cfg.lambda_TBS * cfg.Omega *
                   integrate_1d(mean_density, w_sq,
                                std::numeric_limits<double>::infinity(), spec)
                       .value;
  const double gap_sq = cfg.abs_gap() * cfg.abs_gap();
  double abs_mean = cfg.N * cfg.Omega / (cfg.r_C * cfg.r_C) *
                    integrate_1d([&](double t) { return std::pow(t + gap_sq, -0.5 * cfg.alpha_ABS); },
                                 0.0, cfg.r_C * cfg.r_C, spec)
                        .value;
  return outside / (inside + abs_mean);
}

double sample_interference(Tier serving, double r3, const NetworkConfig& cfg,
                           double tbs_window_radius, RngStream& rng) {
  ExclusionGeometry geo = exclusion_geometry(serving, r3, cfg);
  const double h_sq = cfg.h * cfg.h;
  const double w_sq = tbs_window_radius * tbs_window_radius;
  double interference = 0.0;

  if (w_sq > geo.l1_sq) {
    double area = kPi * (w_sq - geo.l1_sq);
    long count = rng.poisson(cfg.lambda_TBS * area);
    for (long j = 0; j < count; ++j) {
      double t = geo.l1_sq + rng.uniform() * (w_sq - geo.l1_sq);
      LinkState s = rng.uniform() < los_probability(std::sqrt(t), cfg.h, cfg.env)
                        ? LinkState::LoS
                        : LinkState::NLoS;
      FadingParams fp = fading_params(cfg, Tier::TBS, s);
      double g = rng.gamma(fp.m, fp.omega / fp.m);
      interference += g * std::pow(t + h_sq, -0.5 * cfg.alpha(Tier::TBS, s));
    }
  }

  const double gap_sq = cfg.abs_gap() * cfg.abs_gap();
  double span = cfg.r_C * cfg.r_C - geo.l2_sq;
  for (int j = 0; j < geo.abs_interferers; ++j) {
    double t = geo.l2_sq + rng.uniform() * std::max(span, 0.0);
    double g = rng.gamma(cfg.m_ABS, cfg.Omega / cfg.m_ABS);
    interference += g * std::pow(t + gap_sq, -0.5 * cfg.alpha_ABS);
  }
  return interference;
}

McEstimate laplace_sqrt_moment(double s, int k, double r3, Tier tier,
                               const NetworkConfig& cfg, long trials, std::uint64_t seed,
                               int threads) {
  if (s < 0.0 || k < 0)
    throw std::invalid_argument("laplace_sqrt_moment: need s >= 0 and k >= 0");
  exclusion_geometry(tier, r3, cfg);
  const double window = default_window_radius(cfg);
  return blocked_mc_mean(trials, seed, kNormalizerBase, threads, [&](RngStream& rng) {
    double root = std::sqrt(sample_interference(tier, r3, cfg, window, rng));
    return std::pow(root, static_cast<double>(k)) * std::exp(-s * root);
  });
}

double coverage_series(int shape, double x) {
  if (shape < 1) throw std::invalid_argument("coverage_series: shape must be >= 1");
  if (x < 0.0) throw std::invalid_argument("coverage_series: x must be >= 0");
  double term = std::exp(-x);
  double sum = term;
  for (int k = 1; k < shape; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

struct TierFits {
  GammaFit abs_u{};
  int abs_shape = 1;
  std::array<std::optional<GammaFit>, 8> tbs_u;
  std::array<int, 8> tbs_shape{};
  std::array<std::optional<GammaFit>, 8> tbs_v;
};

TierFits make_fits(const NetworkConfig& cfg, const MomentSpec& spec) {
  auto build = [&](const MomentSpec& ms, TierFits& out) {
    LinkStateVector all_los{LinkState::LoS, LinkState::LoS, LinkState::LoS};
    out.abs_u = fit_gamma_U(compute_moments(Tier::ABS, all_los, cfg, ms));
    out.abs_shape = nu_tilde(out.abs_u.nu);
    auto tbs = compute_moments_all_tbs(cfg, ms);
    for (int i = 0; i < 8; ++i) {
      if (tbs[i].mean_U() <= 0.0) continue;
      out.tbs_u[i] = fit_gamma_U(tbs[i]);
      out.tbs_shape[i] = nu_tilde(out.tbs_u[i]->nu);
      out.tbs_v[i] = fit_gamma_V(tbs[i]);
    }
  };
  TierFits fits;
  try {
    build(spec, fits);
    return fits;
  } catch (const std::domain_error&) {
    MomentSpec wide = spec;
    wide.mc_trials = spec.mc_trials * 10;
    wide.stream_base = spec.stream_base + kMomentBase;
    TierFits retry;
    build(wide, retry);
    return retry;
  }
}

// Conditional coverage for one tier across the whole threshold grid.
struct CondCoverage {
  std::vector<double> mean;
  std::vector<double> se;
};

CondCoverage conditional_coverage(Tier tier, const NetworkConfig& cfg,
                                  const std::vector<double>& sqrt_gamma,
                                  const TierFits& fits, const CoverageSpec& spec) {
  const std::size_t ng = sqrt_gamma.size();
  const long trials = spec.triple_trials;
  const long blocks = (trials + kMcBlock - 1) / kMcBlock;
  const double window = default_window_radius(cfg);
  const std::uint64_t base = tier == Tier::ABS ? kAbsTripleBase : kTbsTripleBase;

  std::vector<std::vector<double>> sums(static_cast<std::size_t>(blocks),
                                        std::vector<double>(ng, 0.0));
  std::vector<long> weight(static_cast<std::size_t>(blocks), 0);

  run_blocked(trials, spec.threads, [&](long b, long first, long last) {
    RngStream rng(spec.seed, base + static_cast<std::uint64_t>(b));
    auto& acc = sums[static_cast<std::size_t>(b)];
    for (long t = first; t < last; ++t) {
      OrderedDistances triple = conditional_sample(tier, cfg, rng);

      std::array<double, 8> zeta_weight{};
      if (tier == Tier::TBS) {
        std::array<double, 3> pl;
        for (int i = 0; i < 3; ++i) {
          double z = std::sqrt(std::max(0.0, triple.r[static_cast<std::size_t>(i)] * triple.r[static_cast<std::size_t>(i)] - cfg.h * cfg.h));
          pl[static_cast<std::size_t>(i)] = los_probability(z, cfg.h, cfg.env);
        }
        for (int idx = 0; idx < 8; ++idx) {
          double w = 1.0;
          for (int i = 0; i < 3; ++i) {
            bool nlos = (idx >> i) & 1;
            w *= nlos ? 1.0 - pl[static_cast<std::size_t>(i)] : pl[static_cast<std::size_t>(i)];
          }
          zeta_weight[static_cast<std::size_t>(idx)] = w;
        }
      }

      for (int f = 0; f < spec.fields_per_triple; ++f) {
        double root =
            std::sqrt(sample_interference(tier, triple.r[2], cfg, window, rng));
        for (std::size_t gi = 0; gi < ng; ++gi) {
          double val;
          if (tier == Tier::ABS) {
            val = coverage_series(fits.abs_shape,
                                  sqrt_gamma[gi] * root / fits.abs_u.theta);
          } else {
            val = 0.0;
            for (int idx = 0; idx < 8; ++idx) {
              double w = zeta_weight[static_cast<std::size_t>(idx)];
              if (w <= 0.0 || !fits.tbs_u[static_cast<std::size_t>(idx)]) continue;
              val += w * coverage_series(
                             fits.tbs_shape[static_cast<std::size_t>(idx)],
                             sqrt_gamma[gi] * root /
                                 fits.tbs_u[static_cast<std::size_t>(idx)]->theta);
            }
          }
          acc[gi] += val;
        }
      }
    }
    weight[static_cast<std::size_t>(b)] = (last - first) * spec.fields_per_triple;
  });

  CondCoverage out;
  out.mean.resize(ng);
  out.se.resize(ng);
  double total_w = static_cast<double>(trials) * spec.fields_per_triple;
  for (std::size_t gi = 0; gi < ng; ++gi) {
    std::vector<double> col(static_cast<std::size_t>(blocks));
    for (long b = 0; b < blocks; ++b) col[static_cast<std::size_t>(b)] = sums[static_cast<std::size_t>(b)][gi];
    double mean = pairwise_sum(col) / total_w;
    out.mean[gi] = mean;
    double ss = 0.0;
    for (long b = 0; b < blocks; ++b) {
      double w = static_cast<double>(weight[static_cast<std::size_t>(b)]);
      if (w <= 0.0) continue;
      double diff = sums[static_cast<std::size_t>(b)][gi] / w - mean;
      double frac = w / total_w;
      ss += frac * frac * diff * diff;
    }
    out.se[gi] = blocks > 1
                     ? std::sqrt(ss * static_cast<double>(blocks) /
                                 static_cast<double>(blocks - 1))
                     : 0.0;
  }
  return out;
}

} // namespace

std::vector<CoverageReport> coverage_analytic_sweep(const NetworkConfig& cfg,
                                                    const std::vector<double>& gamma_db,
                                                    const CoverageSpec& spec) {
  require_valid(cfg);
  if (gamma_db.empty())
    throw std::invalid_argument("coverage_analytic_sweep: empty threshold grid");

  TierFits fits = make_fits(cfg, spec.moments);
  AssociationResult assoc = assoc_prob_abs_given_fits(
      fits.tbs_v, cfg, spec.assoc_trials, spec.seed, kAssocBase, spec.threads);

  std::vector<double> sqrt_gamma(gamma_db.size());
  for (std::size_t i = 0; i < gamma_db.size(); ++i)
    sqrt_gamma[i] = std::sqrt(db_to_linear(gamma_db[i]));

  CondCoverage abs_cov = conditional_coverage(Tier::ABS, cfg, sqrt_gamma, fits, spec);
  CondCoverage tbs_cov = conditional_coverage(Tier::TBS, cfg, sqrt_gamma, fits, spec);

  std::vector<CoverageReport> reports(gamma_db.size());
  for (std::size_t i = 0; i < gamma_db.size(); ++i) {
    CoverageReport& rep = reports[i];
    rep.p_abs_cond = abs_cov.mean[i];
    rep.p_tbs_cond = tbs_cov.mean[i];
    rep.se_abs_cond = abs_cov.se[i];
    rep.se_tbs_cond = tbs_cov.se[i];
    rep.assoc = assoc;
    rep.p_total = rep.p_abs_cond * assoc.p_abs + rep.p_tbs_cond * assoc.p_tbs;
    rep.gamma_db = gamma_db[i];
    rep.method = "analytic";
    rep.trials = spec.triple_trials * spec.fields_per_triple;
  }
  return reports;
}

CoverageReport coverage_analytic(const NetworkConfig& cfg, double gamma_db,
                                 const CoverageSpec& spec) {
  return coverage_analytic_sweep(cfg, {gamma_db}, spec).front();
}

} // namespace vhcomp
