// Ground-truth simulator: realized deployments, hand-built single-realization
// oracles for the SIR sampler, and structural properties of the empirical
// coverage estimates.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "test_util.hpp"
#include "vhcomp/sim.hpp"

using namespace vhcomp;

TEST_CASE("realized networks respect the geometry and the intensity") {
  NetworkConfig cfg;
  RngStream rng(51, 0);
  std::vector<double> counts;
  const double window = 500.0;
  for (int i = 0; i < 2000; ++i) {
    Deployment dep = realize_network(cfg, window, rng);
    REQUIRE(dep.abs_positions.size() == static_cast<std::size_t>(cfg.N));
    for (const auto& p : dep.abs_positions) {
      CHECK(p[2] == cfg.H);
      CHECK(std::hypot(p[0], p[1]) <= cfg.r_C * (1.0 + 1e-12));
    }
    for (const auto& p : dep.tbs_positions) {
      CHECK(p[2] == 0.0);
      CHECK(std::hypot(p[0], p[1]) <= window * (1.0 + 1e-12));
    }
    counts.push_back(static_cast<double>(dep.tbs_positions.size()));
  }
  auto m = testutil::sample_moments(counts);
  double expect = cfg.lambda_TBS * 3.14159265358979323846 * window * window;
  CHECK(std::abs(m.mean - expect) < 5.0 * m.se_mean);
  CHECK_THROWS_AS(realize_network(cfg, 0.0, rng), std::invalid_argument);
}

TEST_CASE("aerial-only deployment with exactly three stations has no interference") {
  NetworkConfig cfg;
  Deployment dep;
  dep.region_radius = 1000.0;
  dep.abs_positions = {{0.0, 0.0, cfg.H}, {150.0, 0.0, cfg.H}, {0.0, 220.0, cfg.H}};
  RngStream rng(52, 0);
  SirSample s = sir_at_user({0.0, 0.0, cfg.h}, dep, Policy::Comp3SameTier, cfg, rng);
  CHECK(s.sir_linear == std::numeric_limits<double>::infinity());
  CHECK(s.tier == Tier::ABS);
  bool seen[3] = {false, false, false};
  for (int c : s.comp_set) {
    REQUIRE(c >= 0);
    REQUIRE(c < 3);
    seen[c] = true;
  }
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[2]);
  for (LinkState z : s.zeta) CHECK(z == LinkState::LoS);
}

TEST_CASE("cooperating set is the three nearest of the serving tier") {
  NetworkConfig cfg;
  Deployment dep;
  dep.region_radius = 1000.0;
  dep.abs_positions = {{0.0, 0.0, cfg.H},
                       {200.0, 0.0, cfg.H},
                       {300.0, 0.0, cfg.H},
                       {800.0, 0.0, cfg.H}};
  RngStream rng(53, 0);
  SirSample s = sir_at_user({0.0, 0.0, cfg.h}, dep, Policy::Comp3SameTier, cfg, rng);
  CHECK(std::isfinite(s.sir_linear));
  CHECK(s.sir_linear > 0.0);
  bool has3 = false;
  for (int c : s.comp_set) {
    CHECK(c != 3); // the far station interferes, it never cooperates
    has3 = has3 || c == 3;
  }
  CHECK_FALSE(has3);
}

TEST_CASE("single-station policy picks the strongest long-term power") {
  NetworkConfig cfg;
  Deployment dep;
  dep.region_radius = 1000.0;
  dep.abs_positions = {{0.0, 0.0, cfg.H}, {400.0, 0.0, cfg.H}, {500.0, 0.0, cfg.H}};
  RngStream rng(54, 0);
  SirSample s = sir_at_user({0.0, 0.0, cfg.h}, dep, Policy::SingleNearest, cfg, rng);
  CHECK(s.comp_set[0] == 0); // equal exponents, so nearest wins
  CHECK(s.comp_set[1] == -1);
  CHECK(s.comp_set[2] == -1);
  CHECK(std::isfinite(s.sir_linear));
}

TEST_CASE("pooled policy can mix tiers and reports the strongest one") {
  NetworkConfig cfg;
  Deployment dep;
  dep.region_radius = 1000.0;
  // One terrestrial station directly underneath beats every distant aerial
  // station on long-term power (its line-of-sight draw is overwhelmingly
  // likely directly overhead).
  dep.tbs_positions = {{0.0, 0.0, 0.0}};
  dep.abs_positions = {{600.0, 0.0, cfg.H}, {700.0, 0.0, cfg.H}, {800.0, 0.0, cfg.H}};
  RngStream rng(55, 0);
  SirSample s = sir_at_user({0.0, 0.0, cfg.h}, dep, Policy::StrongestThree, cfg, rng);
  CHECK(s.tier == Tier::TBS);
  CHECK(std::isfinite(s.sir_linear));
}

TEST_CASE("empty deployments are rejected") {
  NetworkConfig cfg;
  Deployment dep;
  RngStream rng(56, 0);
  CHECK_THROWS_AS(sir_at_user({0.0, 0.0, cfg.h}, dep, Policy::Comp3SameTier, cfg, rng),
                  std::invalid_argument);
}

TEST_CASE("empirical coverage reports are consistent and bounded") {
  NetworkConfig cfg;
  CoverageReport rep = empirical_coverage(cfg, 0.0, Policy::Comp3SameTier, 3000, 57, 0);
  CHECK(rep.p_total >= 0.0);
  CHECK(rep.p_total <= 1.0);
  CHECK(rep.assoc.p_abs + rep.assoc.p_tbs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.p_total == doctest::Approx(rep.assoc.p_abs * rep.p_abs_cond +
                                       rep.assoc.p_tbs * rep.p_tbs_cond)
                           .epsilon(1e-12));
  CHECK(rep.method == "montecarlo");
  CHECK(rep.trials == 3000);
}

TEST_CASE("threshold sweep shares realizations, so monotonicity is exact") {
  NetworkConfig cfg;
  std::vector<double> grid{-8.0, -4.0, 0.0, 4.0, 8.0};
  auto reports = empirical_coverage_sweep(cfg, grid, Policy::Comp3SameTier, 3000, 58, 0);
  REQUIRE(reports.size() == grid.size());
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i].p_total <= reports[i - 1].p_total);
    CHECK(reports[i].p_abs_cond <= reports[i - 1].p_abs_cond);
    CHECK(reports[i].p_tbs_cond <= reports[i - 1].p_tbs_cond);
    // Association does not depend on the threshold.
    CHECK(reports[i].assoc.p_abs == reports[0].assoc.p_abs);
  }
}

TEST_CASE("empirical sweep does not depend on the worker count") {
  NetworkConfig cfg;
  auto r1 = empirical_coverage_sweep(cfg, {-4.0, 2.0}, Policy::Comp3SameTier, 4000, 59, 1);
  auto r4 = empirical_coverage_sweep(cfg, {-4.0, 2.0}, Policy::Comp3SameTier, 4000, 59, 4);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].p_total == r4[i].p_total);
    CHECK(r1[i].assoc.p_abs == r4[i].assoc.p_abs);
  }
}

TEST_CASE("user altitude is capped at the operational ceiling") {
  NetworkConfig lo;
  lo.h = 300.0;
  NetworkConfig hi;
  hi.h = 310.0; // still below H, capped to 300 inside the estimator
  CoverageReport a = empirical_coverage(lo, 0.0, Policy::Comp3SameTier, 2000, 60, 0);
  CoverageReport b = empirical_coverage(hi, 0.0, Policy::Comp3SameTier, 2000, 60, 0);
  CHECK(a.p_total == b.p_total);
  CHECK(a.assoc.p_abs == b.assoc.p_abs);
}

TEST_CASE("three-station cooperation beats single-station service") {
  NetworkConfig cfg;
  double comp3 = empirical_coverage(cfg, 0.0, Policy::Comp3SameTier, 6000, 61, 0).p_total;
  double single = empirical_coverage(cfg, 0.0, Policy::SingleNearest, 6000, 61, 0).p_total;
  CHECK(comp3 > single);
}

TEST_CASE("invalid sweep arguments are rejected") {
  NetworkConfig cfg;
  CHECK_THROWS_AS(empirical_coverage_sweep(cfg, {}, Policy::Comp3SameTier, 100, 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_coverage_sweep(cfg, {0.0}, Policy::Comp3SameTier, 0, 1, 0),
                  std::invalid_argument);
}
