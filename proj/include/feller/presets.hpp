#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "feller/family.hpp"
#include "feller/types.hpp"

namespace feller {

// Brownian on (-inf,-6], Poisson (downward jumps) on [-4,4], Cauchy on
// [6,inf); distance-bump weights blend linearly over the eps=2 gaps.
inline FellerFamily preset_bpc() {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::vector<Interval>, LevySpec>> regions;
  regions.push_back({{Interval{-inf, -6.0}}, LevySpec::brownian()});
  regions.push_back({{Interval{-4.0, 4.0}}, LevySpec::poisson(JumpDirection::down)});
  regions.push_back({{Interval{6.0, inf}}, LevySpec::cauchy()});
  return make_separated_regions(std::move(regions), 2.0).with_id("paper-bpc");
}

// alpha(x) = 1 + (19/10) * min(frac(x/4), 1 - frac(x/4)), period 4,
// oscillating between 1 and 1.95.
inline double stable_like_alpha(double x) {
  const double frac = x / 4.0 - std::floor(x / 4.0);
  return 1.0 + 1.9 * std::min(frac, 1.0 - frac);
}

inline FellerFamily preset_stable_like() {
  return make_stable_like(stable_like_alpha, 1.0, 1.95).with_id("paper-stable-like");
}

// beta(x) = -arctan(x)/pi with alpha = delta = 1 and mu = 0; the asymmetry
// of beta, not a drift term, pulls the process back toward the origin.
inline double nig_like_beta(double x) {
  return -std::atan(x) / 3.14159265358979323846;
}

inline FellerFamily preset_nig_like() {
  return make_nig_like([](double) { return 1.0; }, nig_like_beta,
                       [](double) { return 1.0; }, [](double) { return 0.0; }, 0.4)
      .with_id("paper-nig-like");
}

// a(x) = 1 + 10 exp(-1/(25-x^2)) for |x| < 5, else 1 (smooth cutoff);
// b = m = 0, r = 1.
inline double meixner_like_a(double x) {
  if (std::abs(x) < 5.0) {
    const double d = 25.0 - x * x;
    if (d > 0.0) return 1.0 + 10.0 * std::exp(-1.0 / d);
  }
  return 1.0;
}

inline FellerFamily preset_meixner_like() {
  MeixnerMargins margins;
  margins.a0 = 1.0;
  margins.r0 = 1.0;
  margins.b_lo = -1.5707963267948966;
  margins.b_hi = 1.5707963267948966;
  return make_meixner_like(meixner_like_a, [](double) { return 0.0; },
                           [](double) { return 1.0; }, [](double) { return 0.0; },
                           margins)
      .with_id("paper-meixner-like");
}

struct PresetInfo {
  std::string name;
  std::string description;
};

inline std::vector<PresetInfo> preset_catalog() {
  return {
      {"paper-bpc",
       "Brownian on (-inf,-6], Poisson (downward jumps) on [-4,4], Cauchy on "
       "[6,inf); distance-bump weights with eps=2"},
      {"paper-stable-like",
       "stable-like, alpha(x) = 1 + (19/10)*min(x/4 - floor(x/4), ceil(x/4) - x/4) "
       "oscillating in [1, 1.95] with period 4"},
      {"paper-nig-like",
       "NIG-like, alpha = delta = 1, mu = 0, beta(x) = -arctan(x)/pi (mean "
       "reverting)"},
      {"paper-meixner-like",
       "Meixner-like, b = m = 0, r = 1, a(x) = 1 + 10*exp(-1/(25-x^2)) for |x| < 5, "
       "else 1"},
  };
}

inline FellerFamily make_preset(const std::string& name) {
  if (name == "paper-bpc") return preset_bpc();
  if (name == "paper-stable-like") return preset_stable_like();
  if (name == "paper-nig-like") return preset_nig_like();
  if (name == "paper-meixner-like") return preset_meixner_like();
  throw std::invalid_argument(
      "unknown preset '" + name +
      "'; valid names: paper-bpc, paper-stable-like, paper-nig-like, "
      "paper-meixner-like");
}

}  // namespace feller
