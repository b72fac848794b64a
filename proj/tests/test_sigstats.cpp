// Aggregate-signal moments and Gamma fits: empirical validation of the
// computed moments, consistency between the batched and per-vector paths,
// moment-matching round trips, and distribution-level KS checks of the fits.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "vhcomp/channel.hpp"
#include "vhcomp/dist.hpp"
#include "vhcomp/sigstats.hpp"

using namespace vhcomp;

namespace {

const LinkStateVector kLLL{LinkState::LoS, LinkState::LoS, LinkState::LoS};
const LinkStateVector kNNN{LinkState::NLoS, LinkState::NLoS, LinkState::NLoS};

MomentSpec quick_spec() {
  MomentSpec s;
  s.mc_trials = 200000;
  s.seed = 11;
  return s;
}

// Empirical draws of the state-gated aggregates for one TBS state vector.
struct GatedDraws {
  std::vector<double> v, u, v2, u2;
};

GatedDraws draw_gated_tbs(const NetworkConfig& cfg, const LinkStateVector& zeta,
                          long n, RngStream& rng) {
  GatedDraws out;
  for (long i = 0; i < n; ++i) {
    auto r = sample_ordered_tbs(cfg, rng);
    double v = 0.0, u = 0.0;
    for (int k = 0; k < 3; ++k) {
      double pl = los_probability_3d(r[k], cfg.h, cfg.env);
      LinkState s = rng.uniform() < pl ? LinkState::LoS : LinkState::NLoS;
      if (s != zeta[k]) continue;
      double amp = attenuation_amplitude(r[k], cfg.alpha(Tier::TBS, s));
      v += amp;
      u += sample_nakagami_amplitude(fading_params(cfg, Tier::TBS, s), rng) * amp;
    }
    out.v.push_back(v);
    out.u.push_back(u);
    out.v2.push_back(v * v);
    out.u2.push_back(u * u);
  }
  return out;
}

} // namespace

TEST_CASE("computed moments match empirical gated aggregates (terrestrial)") {
  NetworkConfig cfg;
  MomentSpec spec = quick_spec();
  for (const auto& zeta : {kLLL, kNNN}) {
    SignalMoments m = compute_moments(Tier::TBS, zeta, cfg, spec);
    RngStream rng(77, 0);
    GatedDraws d = draw_gated_tbs(cfg, zeta, 120000, rng);
    auto mv = testutil::sample_moments(d.v);
    auto mu = testutil::sample_moments(d.u);
    auto mv2 = testutil::sample_moments(d.v2);
    auto mu2 = testutil::sample_moments(d.u2);
    CHECK(std::abs(mv.mean - m.mean_V()) < 5.0 * mv.se_mean);
    CHECK(std::abs(mu.mean - m.mean_U()) < 5.0 * mu.se_mean);
    double ev2 = m.B[0] + m.B[1] + m.B[2] + m.cross_sum_V();
    double eu2 = m.omega * (m.B[0] + m.B[1] + m.B[2]) + m.cross_sum_U();
    CHECK(std::abs(mv2.mean - ev2) < 5.0 * mv2.se_mean);
    CHECK(std::abs(mu2.mean - eu2) < 5.0 * mu2.se_mean);
  }
}

TEST_CASE("computed moments match empirical aggregates (aerial)") {
  NetworkConfig cfg;
  SignalMoments m = compute_moments(Tier::ABS, kLLL, cfg, quick_spec());
  RngStream rng(78, 0);
  std::vector<double> v, u;
  FadingParams fp = fading_params(cfg, Tier::ABS, LinkState::LoS);
  for (long i = 0; i < 120000; ++i) {
    auto r = sample_ordered_abs(cfg, rng);
    double vs = 0.0, us = 0.0;
    for (int k = 0; k < 3; ++k) {
      double amp = attenuation_amplitude(r[k], cfg.alpha_ABS);
      vs += amp;
      us += sample_nakagami_amplitude(fp, rng) * amp;
    }
    v.push_back(vs);
    u.push_back(us);
  }
  auto mv = testutil::sample_moments(v);
  auto mu = testutil::sample_moments(u);
  CHECK(std::abs(mv.mean - m.mean_V()) < 5.0 * mv.se_mean);
  CHECK(std::abs(mu.mean - m.mean_U()) < 5.0 * mu.se_mean);
}

TEST_CASE("batched terrestrial moments equal the per-vector computation") {
  NetworkConfig cfg;
  MomentSpec spec = quick_spec();
  auto batch = compute_moments_all_tbs(cfg, spec);
  auto vectors = all_state_vectors();
  for (int idx : {0, 3, 7}) {
    SignalMoments solo = compute_moments(Tier::TBS, vectors[idx], cfg, spec);
    for (int n = 0; n < 3; ++n) {
      CHECK(batch[idx].A[n] == doctest::Approx(solo.A[n]).epsilon(1e-12));
      CHECK(batch[idx].B[n] == doctest::Approx(solo.B[n]).epsilon(1e-12));
      CHECK(batch[idx].Delta[n] == doctest::Approx(solo.Delta[n]).epsilon(1e-14));
    }
    // Both paths consume identical per-block streams, so the Monte Carlo
    // cross moments agree to rounding, not merely statistically.
    CHECK(batch[idx].C01 == doctest::Approx(solo.C01).epsilon(1e-12));
    CHECK(batch[idx].C02 == doctest::Approx(solo.C02).epsilon(1e-12));
    CHECK(batch[idx].C12 == doctest::Approx(solo.C12).epsilon(1e-12));
  }
}

TEST_CASE("aerial fixed-state moments coincide with the all-LoS gated vector") {
  NetworkConfig cfg;
  MomentSpec spec = quick_spec();
  SignalMoments gated = compute_moments(Tier::ABS, kLLL, cfg, spec);
  SignalMoments fixed = compute_moments_fixed(Tier::ABS, LinkState::LoS, cfg, spec);
  for (int n = 0; n < 3; ++n) {
    CHECK(fixed.A[n] == doctest::Approx(gated.A[n]).epsilon(1e-13));
    CHECK(fixed.B[n] == doctest::Approx(gated.B[n]).epsilon(1e-13));
  }
  CHECK(fixed.C01 == doctest::Approx(gated.C01).epsilon(1e-13));
  CHECK(fixed.C12 == doctest::Approx(gated.C12).epsilon(1e-13));
}

TEST_CASE("fixed-state terrestrial moments match ungated empirical draws") {
  NetworkConfig cfg;
  for (LinkState s : {LinkState::LoS, LinkState::NLoS}) {
    SignalMoments m = compute_moments_fixed(Tier::TBS, s, cfg, quick_spec());
    FadingParams fp = fading_params(cfg, Tier::TBS, s);
    double alpha = cfg.alpha(Tier::TBS, s);
    RngStream rng(79, 0);
    std::vector<double> u;
    for (long i = 0; i < 100000; ++i) {
      auto r = sample_ordered_tbs(cfg, rng);
      double us = 0.0;
      for (int k = 0; k < 3; ++k)
        us += sample_nakagami_amplitude(fp, rng) * attenuation_amplitude(r[k], alpha);
      u.push_back(us);
    }
    auto mu = testutil::sample_moments(u);
    CHECK(std::abs(mu.mean - m.mean_U()) < 5.0 * mu.se_mean);
  }
}

TEST_CASE("gamma fit inverts hand-built moments") {
  SignalMoments m;
  m.A = {2.0, 0.0, 0.0};
  m.B = {5.0, 0.0, 0.0};
  m.Delta = {0.9, 0.0, 0.0};
  m.omega = 1.0;
  // V: mean 2, second moment 5, variance 1 -> shape 4, scale 1/2.
  GammaFit fv = fit_gamma_V(m);
  CHECK(fv.nu == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(fv.theta == doctest::Approx(0.5).epsilon(1e-14));
  // U: mean 1.8, second moment 5, variance 1.76.
  GammaFit fu = fit_gamma_U(m);
  CHECK(fu.nu == doctest::Approx(1.8 * 1.8 / 1.76).epsilon(1e-14));
  CHECK(fu.theta == doctest::Approx(1.76 / 1.8).epsilon(1e-14));
  // Shape and scale reproduce the matched mean and variance.
  CHECK(fu.nu * fu.theta == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(fu.nu * fu.theta * fu.theta == doctest::Approx(1.76).epsilon(1e-14));
}

TEST_CASE("gamma fit rejects degenerate moment sets") {
  SignalMoments zero;
  CHECK_THROWS_AS(fit_gamma_V(zero), std::domain_error);
  SignalMoments bad;
  bad.A = {2.0, 0.0, 0.0};
  bad.B = {1.0, 0.0, 0.0}; // second moment below mean^2
  bad.Delta = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(fit_gamma_V(bad), std::domain_error);
}

TEST_CASE("integer shape rounds and floors at one") {
  CHECK(nu_tilde(0.02) == 1);
  CHECK(nu_tilde(0.9) == 1);
  CHECK(nu_tilde(1.49) == 1);
  CHECK(nu_tilde(1.51) == 2);
  CHECK(nu_tilde(6.2) == 6);
  CHECK(nu_tilde(6.8) == 7);
  CHECK_THROWS_AS(nu_tilde(0.0), std::invalid_argument);
  CHECK_THROWS_AS(nu_tilde(-2.0), std::invalid_argument);
}

TEST_CASE("fitted gamma approximates the aerial aggregate law (KS)") {
  NetworkConfig cfg;
  SignalMoments m = compute_moments(Tier::ABS, kLLL, cfg, quick_spec());
  GammaFit fit = fit_gamma_V(m);
  RngStream rng(80, 0);
  std::vector<double> v;
  for (long i = 0; i < 50000; ++i) {
    auto r = sample_ordered_abs(cfg, rng);
    v.push_back(attenuation_amplitude(r[0], cfg.alpha_ABS) +
                attenuation_amplitude(r[1], cfg.alpha_ABS) +
                attenuation_amplitude(r[2], cfg.alpha_ABS));
  }
  double ks = testutil::ks_distance(v, [&](double x) { return reg_lower_gamma(fit.nu, x / fit.theta); });
  CHECK(ks < 0.05);
}

TEST_CASE("fitted gamma approximates the gated terrestrial aggregate law (KS)") {
  NetworkConfig cfg;
  SignalMoments m = compute_moments(Tier::TBS, kLLL, cfg, quick_spec());
  GammaFit fit = fit_gamma_V(m);
  RngStream rng(81, 0);
  GatedDraws d = draw_gated_tbs(cfg, kLLL, 50000, rng);
  double ks = testutil::ks_distance(d.v, [&](double x) { return reg_lower_gamma(fit.nu, x / fit.theta); });
  CHECK(ks < 0.05);
}

TEST_CASE("fixed-state fading fit approximates its aggregate law (KS)") {
  NetworkConfig cfg;
  for (LinkState s : {LinkState::LoS, LinkState::NLoS}) {
    SignalMoments m = compute_moments_fixed(Tier::TBS, s, cfg, quick_spec());
    GammaFit fit = fit_gamma_U(m);
    FadingParams fp = fading_params(cfg, Tier::TBS, s);
    double alpha = cfg.alpha(Tier::TBS, s);
    RngStream rng(82, 0);
    std::vector<double> u;
    for (long i = 0; i < 50000; ++i) {
      auto r = sample_ordered_tbs(cfg, rng);
      double us = 0.0;
      for (int k = 0; k < 3; ++k)
        us += sample_nakagami_amplitude(fp, rng) * attenuation_amplitude(r[k], alpha);
      u.push_back(us);
    }
    double ks = testutil::ks_distance(u, [&](double x) { return reg_lower_gamma(fit.nu, x / fit.theta); });
    CHECK(ks < 0.06);
  }
}
