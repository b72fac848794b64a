// Tier association: complementarity and determinism of the estimators,
// analytic/Monte-Carlo agreement, degenerate-fit boundaries, and the curve
// classifier on hand-built shapes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "vhcomp/assoc.hpp"
#include "vhcomp/channel.hpp"

using namespace vhcomp;

namespace {

const double kPi = 3.14159265358979323846;

NetworkConfig scenario_cfg(double h) {
  NetworkConfig cfg;
  cfg.r_C = 500.0;
  cfg.H = 320.0;
  cfg.h = h;
  cfg.N = 30;
  return cfg; // default environment is the suburban curve
}

AssocSpec quick_spec(long trials) {
  AssocSpec s;
  s.moments.mc_trials = 50000;
  s.trials = trials;
  return s;
}

} // namespace

TEST_CASE("representative state distance is the third-neighbor RMS radius") {
  NetworkConfig cfg;
  CHECK(shared_state_distance(cfg) ==
        doctest::Approx(std::sqrt(3.0 / (kPi * cfg.lambda_TBS))).epsilon(1e-14));
  cfg.lambda_TBS = 5e-6;
  CHECK(shared_state_distance(cfg) ==
        doctest::Approx(std::sqrt(3.0 / (kPi * 5e-6))).epsilon(1e-14));
}

TEST_CASE("association probabilities are complementary and bounded") {
  NetworkConfig cfg = scenario_cfg(120.0);
  AssociationResult a = assoc_prob_abs_analytic(cfg, quick_spec(10000));
  CHECK(a.p_abs >= 0.0);
  CHECK(a.p_abs <= 1.0);
  CHECK(a.p_abs + a.p_tbs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.method == "analytic");

  AssocMcResult m = assoc_prob_mc(cfg, 20000, 5, UserPlacement::Center, 0);
  CHECK(m.assoc.p_abs + m.assoc.p_tbs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.assoc.method == "montecarlo");
  CHECK(m.split.all_abs + m.split.all_tbs + m.split.mixed ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.split.all_abs >= 0.0);
  CHECK(m.split.all_tbs >= 0.0);
  CHECK(m.split.mixed >= 0.0);
}

TEST_CASE("estimates do not depend on the worker count") {
  NetworkConfig cfg = scenario_cfg(90.0);
  AssocSpec s1 = quick_spec(8000);
  s1.threads = 1;
  AssocSpec s4 = s1;
  s4.threads = 4;
  AssociationResult a1 = assoc_prob_abs_analytic(cfg, s1);
  AssociationResult a4 = assoc_prob_abs_analytic(cfg, s4);
  CHECK(a1.p_abs == a4.p_abs);
  CHECK(a1.std_error == a4.std_error);

  AssocMcResult m1 = assoc_prob_mc(cfg, 20000, 5, UserPlacement::UniformRegion, 1);
  AssocMcResult m4 = assoc_prob_mc(cfg, 20000, 5, UserPlacement::UniformRegion, 4);
  CHECK(m1.assoc.p_abs == m4.assoc.p_abs);
  CHECK(m1.split.mixed == m4.split.mixed);
}

TEST_CASE("analytic mixture tracks the direct estimator") {
  for (double h : {60.0, 150.0, 280.0}) {
    NetworkConfig cfg = scenario_cfg(h);
    AssociationResult a = assoc_prob_abs_analytic(cfg, quick_spec(30000));
    AssocMcResult m = assoc_prob_mc(cfg, 60000, 5, UserPlacement::Center, 0);
    double gap = std::abs(a.p_abs - m.assoc.p_abs);
    double slack = std::max(0.03, 3.0 * (a.std_error + m.assoc.std_error));
    CHECK(gap <= slack);
  }
}

TEST_CASE("edge users see the aerial tier less often than the center user") {
  NetworkConfig cfg = scenario_cfg(30.0);
  AssocSpec center = quick_spec(30000);
  AssocSpec region = center;
  region.placement = UserPlacement::UniformRegion;
  double pc = assoc_prob_abs_analytic(cfg, center).p_abs;
  double pr = assoc_prob_abs_analytic(cfg, region).p_abs;
  CHECK(pc > pr + 0.01);
}

TEST_CASE("empty fit set means the aerial side wins surely") {
  NetworkConfig cfg = scenario_cfg(120.0);
  std::array<std::optional<GammaFit>, 8> none{};
  AssociationResult r = assoc_prob_abs_given_fits(none, cfg, 2000, 2, 4096, 0);
  CHECK(r.p_abs == 1.0);
  CHECK(r.p_tbs == 0.0);
}

TEST_CASE("an overwhelming terrestrial fit drives the probability to zero") {
  NetworkConfig cfg = scenario_cfg(120.0);
  std::array<std::optional<GammaFit>, 8> fits{};
  fits[0] = GammaFit{1.0, 1e9}; // essentially all mass far above any aerial sum
  AssociationResult r = assoc_prob_abs_given_fits(fits, cfg, 2000, 2, 4096, 0);
  CHECK(r.p_abs < 1e-6);
}

TEST_CASE("estimators reject nonpositive trial counts") {
  NetworkConfig cfg = scenario_cfg(120.0);
  AssocSpec s = quick_spec(0);
  CHECK_THROWS_AS(assoc_prob_abs_analytic(cfg, s), std::invalid_argument);
  CHECK_THROWS_AS(assoc_prob_mc(cfg, 0, 5, UserPlacement::Center, 0), std::invalid_argument);
  std::array<std::optional<GammaFit>, 8> none{};
  CHECK_THROWS_AS(assoc_prob_abs_given_fits(none, cfg, 0, 2, 4096, 0), std::invalid_argument);
}

TEST_CASE("curve classifier finds both half-crossings of a deep valley") {
  std::vector<double> h{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> p{0.9, 0.6, 0.2, 0.55, 0.8};
  RegimeReport rep = classify_curve(h, p);
  CHECK(rep.u_shaped);
  CHECK(rep.h_threshold == 2.0);
  CHECK(rep.min_value == 0.2);
  CHECK(rep.classification == "u-shaped, two half-crossings");
  REQUIRE(rep.half_heights.size() == 2);
  CHECK(rep.half_heights[0] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(rep.half_heights[1] == doctest::Approx(3.0 - 0.05 / 0.35).epsilon(1e-12));
}

TEST_CASE("curve classifier labels the remaining shapes") {
  RegimeReport above = classify_curve({0.0, 1.0, 2.0}, {0.9, 0.7, 0.95});
  CHECK(above.u_shaped);
  CHECK(above.classification == "u-shaped, stays above one half");
  CHECK(above.half_heights.empty());

  RegimeReport tangent = classify_curve({0.0, 1.0, 2.0}, {0.9, 0.5, 0.9});
  CHECK(tangent.classification == "u-shaped, tangent to one half at the minimum");
  REQUIRE(tangent.half_heights.size() == 1);
  CHECK(tangent.half_heights[0] == 1.0);

  RegimeReport below = classify_curve({0.0, 1.0, 2.0}, {0.45, 0.2, 0.4});
  CHECK(below.classification == "u-shaped, stays below one half");

  RegimeReport one = classify_curve({0.0, 1.0, 2.0}, {0.9, 0.2, 0.4});
  CHECK(one.classification == "u-shaped, one half-crossing");
  REQUIRE(one.half_heights.size() == 1);

  RegimeReport mono = classify_curve({0.0, 1.0, 2.0}, {0.9, 0.7, 0.5});
  CHECK_FALSE(mono.u_shaped);
  CHECK(mono.classification == "not-u-shaped");
}

TEST_CASE("curve classifier validates its inputs") {
  CHECK_THROWS_AS(classify_curve({0.0, 1.0}, {0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify_curve({0.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify_curve({0.0, 2.0, 1.0}, {0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("altitude sweep rejects grid points outside the open altitude range") {
  NetworkConfig cfg = scenario_cfg(120.0);
  AssocSpec s = quick_spec(1000);
  CHECK_THROWS_AS(regime_analysis(cfg, {100.0, 320.0}, s), std::invalid_argument);
  CHECK_THROWS_AS(regime_analysis(cfg, {0.0, 100.0}, s), std::invalid_argument);
}

TEST_CASE("altitude sweep returns a consistent report") {
  NetworkConfig cfg = scenario_cfg(120.0);
  AssocSpec s;
  s.moments.mc_trials = 10000;
  s.trials = 2000;
  std::vector<double> grid{60.0, 150.0, 280.0};
  RegimeReport rep = regime_analysis(cfg, grid, s);
  REQUIRE(rep.p_abs.size() == grid.size());
  double lo = 1.0;
  for (double p : rep.p_abs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    lo = std::min(lo, p);
  }
  CHECK(rep.min_value == lo);
  bool on_grid = false;
  for (double g : grid) on_grid = on_grid || g == rep.h_threshold;
  CHECK(on_grid);
}
