// Tier association.  The Monte Carlo path realizes both trios, draws the
// shared terrestrial line-of-sight state and per-link fading, and compares
// aggregate amplitudes directly; the analytic path fits the two fixed-state
// terrestrial aggregates with Gamma laws and mixes their CDFs, evaluated at
// the realized aerial aggregate, with the state probabilities.

#include "vhcomp/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "vhcomp/channel.hpp"
#include "vhcomp/dist.hpp"
#include "vhcomp/numerics.hpp"
#include "vhcomp/rng.hpp"

namespace vhcomp {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Stream block offset for the direct Monte Carlo estimator, away from the
// bases used by the moment machinery under the same seed.
constexpr std::uint64_t kMcStreamBase = 1u << 20;

double abs_aggregate(const std::array<double, 3>& r, const NetworkConfig& cfg) {
  double a = cfg.alpha(Tier::ABS, LinkState::LoS);
  double v = 0.0;
  for (double d : r) v += attenuation_amplitude(d, a);
  return v;
}

// Three smallest 3D distances from a user at planar offset (ux, uy) to N
// fresh uniform disk points, streamed without storing the full set.
std::array<double, 3> nearest_abs_triple(const NetworkConfig& cfg, double ux, double uy,
                                         RngStream& rng) {
  const double gap2 = cfg.abs_gap() * cfg.abs_gap();
  const double inf = std::numeric_limits<double>::infinity();
  double b0 = inf, b1 = inf, b2 = inf;
  for (int i = 0; i < cfg.N; ++i) {
    double rad = cfg.r_C * std::sqrt(rng.uniform());
    double ang = 2.0 * kPi * rng.uniform();
    double dx = rad * std::cos(ang) - ux;
    double dy = rad * std::sin(ang) - uy;
    double d2 = dx * dx + dy * dy + gap2;
    if (d2 < b2) {
      if (d2 < b1) {
        b2 = b1;
        if (d2 < b0) {
          b1 = b0;
          b0 = d2;
        } else {
          b1 = d2;
        }
      } else {
        b2 = d2;
      }
    }
  }
  return {std::sqrt(b0), std::sqrt(b1), std::sqrt(b2)};
}

} // namespace

double shared_state_distance(const NetworkConfig& cfg) {
  return std::sqrt(3.0 / (kPi * cfg.lambda_TBS));
}

std::array<GammaFit, 2> tbs_u_state_fits(const NetworkConfig& cfg, const MomentSpec& spec) {
  return {fit_gamma_U(compute_moments_fixed(Tier::TBS, LinkState::LoS, cfg, spec)),
          fit_gamma_U(compute_moments_fixed(Tier::TBS, LinkState::NLoS, cfg, spec))};
}

std::array<std::optional<GammaFit>, 8> tbs_v_fits(const NetworkConfig& cfg,
                                                  const MomentSpec& spec) {
  auto attempt = [&](const MomentSpec& s, bool& needs_retry) {
    std::array<std::optional<GammaFit>, 8> fits;
    needs_retry = false;
    auto moments = compute_moments_all_tbs(cfg, s);
    for (int i = 0; i < 8; ++i) {
      if (moments[i].mean_V() <= 0.0) continue; // state vector without mass
      try {
        fits[i] = fit_gamma_V(moments[i]);
      } catch (const std::domain_error&) {
        needs_retry = true; // variance came out non-positive, likely MC noise
      }
    }
    return fits;
  };

  bool retry = false;
  auto fits = attempt(spec, retry);
  if (!retry) return fits;

  MomentSpec wide = spec;
  wide.mc_trials = spec.mc_trials * 10;
  fits = attempt(wide, retry);
  if (retry)
    throw std::runtime_error(
        "tbs_v_fits: matched variance stayed non-positive after widening the "
        "cross-moment sample tenfold; configuration looks degenerate");
  return fits;
}

AssociationResult assoc_prob_abs_given_fits(
    const std::array<std::optional<GammaFit>, 8>& fits, const NetworkConfig& cfg,
    long trials, std::uint64_t seed, std::uint64_t stream_base, int threads) {
  require_valid(cfg);
  if (trials < 1) throw std::invalid_argument("association: trials must be >= 1");

  // The realized terrestrial aggregate equals its state-matched gated sum and
  // dominates the other seven partial sums, so the aerial side wins exactly
  // when it beats all eight.  Conditioned on the aerial triple those eight
  // wins are treated as independent; the expectation over the triple stays
  // outside the product, which keeps the strong coupling through the shared
  // aerial aggregate exact.
  const McEstimate est = blocked_mc_mean(
      trials, seed, stream_base, threads, [&](RngStream& rng) {
        auto r = sample_ordered_abs(cfg, rng);
        double v = abs_aggregate(r, cfg);
        double product = 1.0;
        for (int i = 0; i < 8; ++i) {
          if (!fits[i]) continue; // zero-mass state: the aerial side wins surely
          product *= reg_lower_gamma(fits[i]->nu, v / fits[i]->theta);
        }
        return product;
      });

  AssociationResult out;
  out.p_abs = std::clamp(est.mean, 0.0, 1.0);
  out.p_tbs = 1.0 - out.p_abs;
  out.std_error = est.std_error;
  out.method = "analytic";
  return out;
}

AssociationResult assoc_prob_abs_analytic(const NetworkConfig& cfg, const AssocSpec& spec) {
  require_valid(cfg);
  if (spec.trials < 1) throw std::invalid_argument("association: trials must be >= 1");

  const std::array<GammaFit, 2> fits = tbs_u_state_fits(cfg, spec.moments);
  const double p_los = los_probability(shared_state_distance(cfg), cfg.h, cfg.env);
  const FadingParams fade = fading_params(cfg, Tier::ABS, LinkState::LoS);
  const double a_abs = cfg.alpha(Tier::ABS, LinkState::LoS);

  const McEstimate est = blocked_mc_mean(
      spec.trials, spec.seed, spec.stream_base, spec.threads, [&](RngStream& rng) {
        std::array<double, 3> r;
        if (spec.placement == UserPlacement::Center) {
          r = sample_ordered_abs(cfg, rng);
        } else {
          double ux = rng.uniform(-cfg.r_C, cfg.r_C);
          double uy = rng.uniform(-cfg.r_C, cfg.r_C);
          r = nearest_abs_triple(cfg, ux, uy, rng);
        }
        double u = 0.0;
        for (double d : r)
          u += sample_nakagami_amplitude(fade, rng) * attenuation_amplitude(d, a_abs);
        double win_los = reg_lower_gamma(fits[0].nu, u / fits[0].theta);
        double win_nlos = reg_lower_gamma(fits[1].nu, u / fits[1].theta);
        return p_los * win_los + (1.0 - p_los) * win_nlos;
      });

  AssociationResult out;
  out.p_abs = std::clamp(est.mean, 0.0, 1.0);
  out.p_tbs = 1.0 - out.p_abs;
  out.std_error = est.std_error;
  out.method = "analytic";
  return out;
}

AssocMcResult assoc_prob_mc(const NetworkConfig& cfg, long trials, std::uint64_t seed,
                            UserPlacement placement, int threads) {
  require_valid(cfg);
  if (trials < 1) throw std::invalid_argument("assoc_prob_mc: trials must be >= 1");

  const double a_abs = cfg.alpha(Tier::ABS, LinkState::LoS);
  const double p_los = los_probability(shared_state_distance(cfg), cfg.h, cfg.env);
  const FadingParams fade_abs = fading_params(cfg, Tier::ABS, LinkState::LoS);
  const FadingParams fade_tbs[2] = {fading_params(cfg, Tier::TBS, LinkState::LoS),
                                    fading_params(cfg, Tier::TBS, LinkState::NLoS)};
  const long blocks = (trials + kMcBlock - 1) / kMcBlock;

  struct Tally {
    double abs_win = 0.0;
    double all_abs = 0.0;
    double all_tbs = 0.0;
    long count = 0;
  };
  std::vector<Tally> tallies(blocks);

  run_blocked(trials, threads, [&](long b, long first, long last) {
    RngStream rng(seed, kMcStreamBase + static_cast<std::uint64_t>(b));
    Tally tally;
    std::array<double, 3> rabs;
    for (long t = first; t < last; ++t) {
      if (placement == UserPlacement::Center) {
        rabs = sample_ordered_abs(cfg, rng);
      } else {
        double ux = rng.uniform(-cfg.r_C, cfg.r_C);
        double uy = rng.uniform(-cfg.r_C, cfg.r_C);
        rabs = nearest_abs_triple(cfg, ux, uy, rng);
      }
      auto rtbs = sample_ordered_tbs(cfg, rng);

      // One line-of-sight state for the whole terrestrial trio.
      LinkState s = rng.uniform() < p_los ? LinkState::LoS : LinkState::NLoS;
      int si = s == LinkState::LoS ? 0 : 1;
      double a_tbs = cfg.alpha(Tier::TBS, s);

      double u_abs = 0.0, u_tbs = 0.0;
      std::array<double, 6> power; // pooled long-term powers, aerial first
      for (int n = 0; n < 3; ++n) {
        double ra = rabs[static_cast<std::size_t>(n)];
        u_abs += sample_nakagami_amplitude(fade_abs, rng) * attenuation_amplitude(ra, a_abs);
        power[static_cast<std::size_t>(n)] = cfg.Omega * attenuation_power(ra, a_abs);
      }
      for (int n = 0; n < 3; ++n) {
        double rt = rtbs[static_cast<std::size_t>(n)];
        u_tbs += sample_nakagami_amplitude(fade_tbs[si], rng) * attenuation_amplitude(rt, a_tbs);
        power[static_cast<std::size_t>(3 + n)] = cfg.Omega * attenuation_power(rt, a_tbs);
      }

      if (u_abs > u_tbs) tally.abs_win += 1.0;

      // Composition of the three strongest of the six pooled candidates.
      std::array<int, 6> order{0, 1, 2, 3, 4, 5};
      std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                        [&](int lhs, int rhs) { return power[static_cast<std::size_t>(lhs)] > power[static_cast<std::size_t>(rhs)]; });
      int aerial = 0;
      for (int k = 0; k < 3; ++k) aerial += order[static_cast<std::size_t>(k)] < 3 ? 1 : 0;
      if (aerial == 3)
        tally.all_abs += 1.0;
      else if (aerial == 0)
        tally.all_tbs += 1.0;
      ++tally.count;
    }
    tallies[b] = tally;
  });

  auto reduce = [&](auto member) {
    std::vector<double> col(blocks);
    for (long b = 0; b < blocks; ++b) col[b] = tallies[b].*member;
    return pairwise_sum(col);
  };
  double n = static_cast<double>(trials);
  double wins = reduce(&Tally::abs_win);
  double all_abs = reduce(&Tally::all_abs);
  double all_tbs = reduce(&Tally::all_tbs);

  AssocMcResult out;
  out.assoc.p_abs = wins / n;
  out.assoc.p_tbs = 1.0 - out.assoc.p_abs;
  out.assoc.std_error = std::sqrt(std::max(0.0, out.assoc.p_abs * (1.0 - out.assoc.p_abs) / n));
  out.assoc.method = "montecarlo";
  out.split.all_abs = all_abs / n;
  out.split.all_tbs = all_tbs / n;
  out.split.mixed = (n - all_abs - all_tbs) / n;
  return out;
}

RegimeReport classify_curve(const std::vector<double>& h_grid,
                            const std::vector<double>& p_abs) {
  if (h_grid.size() != p_abs.size())
    throw std::invalid_argument("classify_curve: grid and curve lengths differ");
  if (h_grid.size() < 3)
    throw std::invalid_argument("classify_curve: need at least 3 grid points");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] > h_grid[i - 1]))
      throw std::invalid_argument("classify_curve: grid must be strictly increasing");

  RegimeReport rep;
  rep.h_grid = h_grid;
  rep.p_abs = p_abs;

  std::size_t imin = 0;
  for (std::size_t i = 1; i < p_abs.size(); ++i)
    if (p_abs[i] < p_abs[imin]) imin = i;
  rep.h_threshold = h_grid[imin];
  rep.min_value = p_abs[imin];

  const double kShapeMargin = 0.02;
  rep.u_shaped = imin > 0 && imin + 1 < p_abs.size() &&
                 p_abs.front() >= rep.min_value + kShapeMargin &&
                 p_abs.back() >= rep.min_value + kShapeMargin;
  if (!rep.u_shaped) {
    rep.classification = "not-u-shaped";
    return rep;
  }

  // Crossing of one half on a presumed-monotone branch, by linear
  // interpolation between the bracketing grid points.
  auto interp_cross = [&](std::size_t from, std::size_t to) -> double {
    std::size_t step = from < to ? 1 : static_cast<std::size_t>(-1);
    for (std::size_t i = from; i != to; i += step) {
      double p0 = p_abs[i], p1 = p_abs[i + step];
      if ((p0 - 0.5) * (p1 - 0.5) <= 0.0) {
        double t = p0 == p1 ? 0.5 : (0.5 - p0) / (p1 - p0);
        return h_grid[i] + t * (h_grid[i + step] - h_grid[i]);
      }
    }
    return 0.5 * (h_grid[from] + h_grid[to]); // fallback, noisy bracket
  };

  const double kTangentTol = 5e-3;
  if (rep.min_value > 0.5 + kTangentTol) {
    rep.classification = "u-shaped, stays above one half";
  } else if (std::abs(rep.min_value - 0.5) <= kTangentTol) {
    rep.half_heights.push_back(rep.h_threshold);
    rep.classification = "u-shaped, tangent to one half at the minimum";
  } else {
    if (p_abs.front() >= 0.5) rep.half_heights.push_back(interp_cross(0, imin));
    if (p_abs.back() >= 0.5)
      rep.half_heights.push_back(interp_cross(p_abs.size() - 1, imin));
    std::sort(rep.half_heights.begin(), rep.half_heights.end());
    switch (rep.half_heights.size()) {
      case 0: rep.classification = "u-shaped, stays below one half"; break;
      case 1: rep.classification = "u-shaped, one half-crossing"; break;
      default: rep.classification = "u-shaped, two half-crossings"; break;
    }
  }
  return rep;
}

RegimeReport regime_analysis(const NetworkConfig& base, const std::vector<double>& h_grid,
                             const AssocSpec& spec) {
  for (double h : h_grid)
    if (!(h > 0.0 && h < base.H))
      throw std::invalid_argument("regime_analysis: grid altitudes must lie in (0, H)");

  std::vector<double> curve;
  curve.reserve(h_grid.size());
  for (double h : h_grid) {
    NetworkConfig cfg = base;
    cfg.h = h;
    curve.push_back(assoc_prob_abs_analytic(cfg, spec).p_abs);
  }

  RegimeReport rep = classify_curve(h_grid, curve);
  if (rep.half_heights.empty() || std::abs(rep.min_value - 0.5) <= 5e-3) return rep;

  // Sharpen each interpolated crossing by bisection; identical seeds make the
  // curve a smooth deterministic function of h, so bisection is safe.
  auto eval = [&](double h) {
    NetworkConfig cfg = base;
    cfg.h = h;
    return assoc_prob_abs_analytic(cfg, spec).p_abs - 0.5;
  };
  std::vector<double> sharpened;
  for (double h0 : rep.half_heights) {
    std::size_t imin = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
      if (curve[i] < curve[imin]) imin = i;
    double lo, hi;
    if (h0 <= rep.h_threshold) {
      lo = h_grid.front();
      hi = h_grid[imin];
    } else {
      lo = h_grid[imin];
      hi = h_grid.back();
    }
    double flo = eval(lo);
    double fhi = eval(hi);
    if (flo * fhi > 0.0) {
      sharpened.push_back(h0); // bracket lost to noise, keep interpolation
      continue;
    }
    for (int it = 0; it < 24 && hi - lo > 0.5; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = eval(mid);
      if (flo * fm <= 0.0) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    sharpened.push_back(0.5 * (lo + hi));
  }
  std::sort(sharpened.begin(), sharpened.end());
  rep.half_heights = sharpened;
  return rep;
}

} // namespace vhcomp
