#include "vhcomp/sigstats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vhcomp/channel.hpp"
#include "vhcomp/dist.hpp"

namespace vhcomp {

namespace {

const double kPi = 3.14159265358979323846;

// Probability that link n of the given tier is in the prescribed state when
// its 3D distance is r.  Aerial links are always line of sight.
double state_weight(Tier tier, LinkState s, double r, const NetworkConfig& cfg) {
  if (tier == Tier::ABS) return s == LinkState::LoS ? 1.0 : 0.0;
  double pl = los_probability_3d(r, cfg.h, cfg.env);
  return s == LinkState::LoS ? pl : 1.0 - pl;
}

// Upper integration limit for the terrestrial marginals: beyond this radius
// the third-nearest law keeps less than e^-50 of its mass.
double tbs_integration_upper(const NetworkConfig& cfg) {
  return std::sqrt(cfg.h * cfg.h + 50.0 / (kPi * cfg.lambda_TBS));
}

} // namespace

SignalMoments compute_moments(Tier tier, const LinkStateVector& zeta,
                              const NetworkConfig& cfg, const MomentSpec& spec) {
  require_valid(cfg);
  SignalMoments m;
  m.omega = cfg.Omega;
  double lo = tier == Tier::ABS ? cfg.abs_gap() : cfg.h;
  double hi = tier == Tier::ABS ? cfg.r_max() : tbs_integration_upper(cfg);

  for (int n = 0; n < 3; ++n) {
    double alpha = cfg.alpha(tier, zeta[n]);
    m.Delta[n] = fading_first_moment(cfg.m(tier, zeta[n]), cfg.Omega);
    auto marginal = [&](double r) {
      return tier == Tier::ABS ? pdf_abs_nth(r, n + 1, cfg) : pdf_tbs_nth(r, n + 1, cfg);
    };
    auto weighted = [&](double r, double expo) {
      double w = state_weight(tier, zeta[n], r, cfg);
      return w == 0.0 ? 0.0 : std::pow(r, expo) * w * marginal(r);
    };
    m.A[n] = integrate_1d([&](double r) { return weighted(r, -alpha / 2.0); }, lo, hi, spec.quad).value;
    m.B[n] = integrate_1d([&](double r) { return weighted(r, -alpha); }, lo, hi, spec.quad).value;
  }

  // Cross moments over the joint ordered law, by Monte Carlo on exact draws.
  long trials = spec.mc_trials;
  long nblocks = (trials + kMcBlock - 1) / kMcBlock;
  std::vector<double> s01(nblocks, 0.0), s02(nblocks, 0.0), s12(nblocks, 0.0);
  double a0 = cfg.alpha(tier, zeta[0]), a1 = cfg.alpha(tier, zeta[1]), a2 = cfg.alpha(tier, zeta[2]);
  run_blocked(trials, spec.threads, [&](long b, long first, long last) {
    RngStream rng(spec.seed, spec.stream_base + static_cast<std::uint64_t>(b));
    double acc01 = 0.0, acc02 = 0.0, acc12 = 0.0;
    for (long i = first; i < last; ++i) {
      auto r = tier == Tier::ABS ? sample_ordered_abs(cfg, rng) : sample_ordered_tbs(cfg, rng);
      double w0 = state_weight(tier, zeta[0], r[0], cfg);
      double w1 = state_weight(tier, zeta[1], r[1], cfg);
      double w2 = state_weight(tier, zeta[2], r[2], cfg);
      double t0 = w0 * std::pow(r[0], -a0 / 2.0);
      double t1 = w1 * std::pow(r[1], -a1 / 2.0);
      double t2 = w2 * std::pow(r[2], -a2 / 2.0);
      acc01 += t0 * t1;
      acc02 += t0 * t2;
      acc12 += t1 * t2;
    }
    s01[b] = acc01;
    s02[b] = acc02;
    s12[b] = acc12;
  });
  m.C01 = pairwise_sum(s01) / static_cast<double>(trials);
  m.C02 = pairwise_sum(s02) / static_cast<double>(trials);
  m.C12 = pairwise_sum(s12) / static_cast<double>(trials);
  return m;
}

SignalMoments compute_moments_fixed(Tier tier, LinkState s, const NetworkConfig& cfg,
                                    const MomentSpec& spec) {
  require_valid(cfg);
  SignalMoments m;
  m.omega = cfg.Omega;
  double lo = tier == Tier::ABS ? cfg.abs_gap() : cfg.h;
  double hi = tier == Tier::ABS ? cfg.r_max() : tbs_integration_upper(cfg);
  const double alpha = cfg.alpha(tier, s);
  const double delta = fading_first_moment(cfg.m(tier, s), cfg.Omega);

  for (int n = 0; n < 3; ++n) {
    m.Delta[n] = delta;
    auto marginal = [&](double r) {
      return tier == Tier::ABS ? pdf_abs_nth(r, n + 1, cfg) : pdf_tbs_nth(r, n + 1, cfg);
    };
    m.A[n] = integrate_1d([&](double r) { return std::pow(r, -alpha / 2.0) * marginal(r); },
                          lo, hi, spec.quad).value;
    m.B[n] = integrate_1d([&](double r) { return std::pow(r, -alpha) * marginal(r); },
                          lo, hi, spec.quad).value;
  }

  long trials = spec.mc_trials;
  long nblocks = (trials + kMcBlock - 1) / kMcBlock;
  std::vector<double> s01(nblocks, 0.0), s02(nblocks, 0.0), s12(nblocks, 0.0);
  run_blocked(trials, spec.threads, [&](long b, long first, long last) {
    RngStream rng(spec.seed, spec.stream_base + static_cast<std::uint64_t>(b));
    double acc01 = 0.0, acc02 = 0.0, acc12 = 0.0;
    for (long i = first; i < last; ++i) {
      auto r = tier == Tier::ABS ? sample_ordered_abs(cfg, rng) : sample_ordered_tbs(cfg, rng);
      double t0 = std::pow(r[0], -alpha / 2.0);
      double t1 = std::pow(r[1], -alpha / 2.0);
      double t2 = std::pow(r[2], -alpha / 2.0);
      acc01 += t0 * t1;
      acc02 += t0 * t2;
      acc12 += t1 * t2;
    }
    s01[b] = acc01;
    s02[b] = acc02;
    s12[b] = acc12;
  });
  m.C01 = pairwise_sum(s01) / static_cast<double>(trials);
  m.C02 = pairwise_sum(s02) / static_cast<double>(trials);
  m.C12 = pairwise_sum(s12) / static_cast<double>(trials);
  return m;
}

std::array<SignalMoments, 8> compute_moments_all_tbs(const NetworkConfig& cfg,
                                                     const MomentSpec& spec) {
  require_valid(cfg);
  double lo = cfg.h;
  double hi = tbs_integration_upper(cfg);
  double alpha_of[2] = {cfg.alpha_TBS_L, cfg.alpha_TBS_N};
  double m_of[2] = {cfg.m_TBS_L, cfg.m_TBS_N};

  // Twelve distinct marginals: slot n in state s, amplitude and power units.
  double A[3][2], B[3][2];
  for (int n = 0; n < 3; ++n) {
    for (int s = 0; s < 2; ++s) {
      LinkState st = s == 0 ? LinkState::LoS : LinkState::NLoS;
      double alpha = alpha_of[s];
      auto weighted = [&](double r, double expo) {
        double w = state_weight(Tier::TBS, st, r, cfg);
        return w == 0.0 ? 0.0 : std::pow(r, expo) * w * pdf_tbs_nth(r, n + 1, cfg);
      };
      A[n][s] = integrate_1d([&](double r) { return weighted(r, -alpha / 2.0); }, lo, hi, spec.quad).value;
      B[n][s] = integrate_1d([&](double r) { return weighted(r, -alpha); }, lo, hi, spec.quad).value;
    }
  }

  // One pass of triple draws; per draw each slot contributes its two
  // state-gated amplitude terms, from which all eight vectors assemble.
  long trials = spec.mc_trials;
  long nblocks = (trials + kMcBlock - 1) / kMcBlock;
  std::vector<std::array<double, 24>> partial(nblocks);
  run_blocked(trials, spec.threads, [&](long b, long first, long last) {
    RngStream rng(spec.seed, spec.stream_base + static_cast<std::uint64_t>(b));
    std::array<double, 24> acc{};
    for (long i = first; i < last; ++i) {
      auto r = sample_ordered_tbs(cfg, rng);
      double t[3][2];
      for (int n = 0; n < 3; ++n) {
        double pl = los_probability_3d(r[n], cfg.h, cfg.env);
        t[n][0] = pl * std::pow(r[n], -alpha_of[0] / 2.0);
        t[n][1] = (1.0 - pl) * std::pow(r[n], -alpha_of[1] / 2.0);
      }
      for (int idx = 0; idx < 8; ++idx) {
        int s0 = idx & 1, s1 = (idx >> 1) & 1, s2 = (idx >> 2) & 1;
        acc[3 * idx + 0] += t[0][s0] * t[1][s1];
        acc[3 * idx + 1] += t[0][s0] * t[2][s2];
        acc[3 * idx + 2] += t[1][s1] * t[2][s2];
      }
    }
    partial[b] = acc;
  });
  std::array<double, 24> cross{};
  {
    std::vector<double> col(nblocks);
    for (int c = 0; c < 24; ++c) {
      for (long b = 0; b < nblocks; ++b) col[b] = partial[b][c];
      cross[c] = pairwise_sum(col) / static_cast<double>(trials);
    }
  }

  std::array<SignalMoments, 8> out;
  auto vectors = all_state_vectors();
  for (int idx = 0; idx < 8; ++idx) {
    SignalMoments& m = out[idx];
    m.omega = cfg.Omega;
    for (int n = 0; n < 3; ++n) {
      int s = vectors[idx][n] == LinkState::LoS ? 0 : 1;
      m.A[n] = A[n][s];
      m.B[n] = B[n][s];
      m.Delta[n] = fading_first_moment(m_of[s], cfg.Omega);
    }
    m.C01 = cross[3 * idx + 0];
    m.C02 = cross[3 * idx + 1];
    m.C12 = cross[3 * idx + 2];
  }
  return out;
}

namespace {

GammaFit fit_from(double mean, double var, const char* what) {
  if (!(mean > 0.0))
    throw std::domain_error(std::string("gamma fit (") + what + "): zero-mass aggregate, no fit exists");
  if (!(var > 0.0))
    throw std::domain_error(std::string("gamma fit (") + what + "): matched variance is not positive");
  return {mean * mean / var, var / mean};
}

} // namespace

GammaFit fit_gamma_U(const SignalMoments& m) {
  double mean = m.mean_U();
  double second = m.omega * (m.B[0] + m.B[1] + m.B[2]) + m.cross_sum_U();
  return fit_from(mean, second - mean * mean, "fading aggregate");
}

GammaFit fit_gamma_V(const SignalMoments& m) {
  double mean = m.mean_V();
  double second = m.B[0] + m.B[1] + m.B[2] + m.cross_sum_V();
  return fit_from(mean, second - mean * mean, "distance aggregate");
}

int nu_tilde(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu_tilde: shape must be positive");
  long r = std::lround(nu);
  return r < 1 ? 1 : static_cast<int>(r);
}

} // namespace vhcomp
