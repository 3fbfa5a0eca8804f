#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "feller/family.hpp"
#include "feller/presets.hpp"
#include "feller/stats.hpp"
#include "feller/validate.hpp"
#include "oracles.hpp"

using feller::Complex;
using feller::eval_exponent;
using feller::FellerFamily;
using feller::JumpDirection;
using feller::LevySpec;
using feller::RngStream;
using feller::WeightFunction;

namespace {

const std::vector<double> kXiProbe{-9.5, -3.0, -1.0, -0.25, 0.0, 0.1, 0.8, 2.0, 7.7};

WeightFunction constant_weight(double v) {
  WeightFunction w;
  w.eval = [v](double) { return v; };
  w.declared_lipschitz = 0.0;
  w.declared_bound = std::abs(v);
  w.description = "const";
  return w;
}

}  // namespace

TEST_CASE("bpc preset is exactly the pure component on each region") {
  const auto fam = feller::preset_bpc();
  REQUIRE(fam.id() == "paper-bpc");
  const auto bm = LevySpec::brownian();
  const auto po = LevySpec::poisson(JumpDirection::down);
  const auto ca = LevySpec::cauchy();
  for (double xi : kXiProbe) {
    for (double x : {-50.0, -10.0, -6.0}) {
      REQUIRE(fam.exponent_at(x, xi) == eval_exponent(bm, xi));
    }
    for (double x : {-4.0, -1.0, 0.0, 2.5, 4.0}) {
      REQUIRE(fam.exponent_at(x, xi) == eval_exponent(po, xi));
    }
    for (double x : {6.0, 10.0, 42.0}) {
      REQUIRE(fam.exponent_at(x, xi) == eval_exponent(ca, xi));
    }
  }
}

TEST_CASE("bpc blend zone halves the argument of both neighbors") {
  const auto fam = feller::preset_bpc();
  const auto bm = LevySpec::brownian();
  const auto po = LevySpec::poisson(JumpDirection::down);
  const auto ca = LevySpec::cauchy();
  for (double xi : kXiProbe) {
    const Complex want_lo =
        eval_exponent(bm, 0.5 * xi) + eval_exponent(po, 0.5 * xi);
    REQUIRE(std::abs(fam.exponent_at(-5.0, xi) - want_lo) < 1e-15);
    const Complex want_hi =
        eval_exponent(po, 0.5 * xi) + eval_exponent(ca, 0.5 * xi);
    REQUIRE(std::abs(fam.exponent_at(5.0, xi) - want_hi) < 1e-15);
  }
}

TEST_CASE("bpc sampling on a pure region is bitwise the component sampler") {
  const auto fam = feller::preset_bpc();
  const auto po = LevySpec::poisson(JumpDirection::down);
  RngStream a(17), b(17);
  for (int i = 0; i < 200; ++i) {
    REQUIRE(fam.sample_increment(0.0, 0.1, a) ==
            feller::sample_increment(po, 0.1, b));
  }
  const auto ca = LevySpec::cauchy();
  RngStream c(18), d(18);
  for (int i = 0; i < 200; ++i) {
    REQUIRE(fam.sample_increment(10.0, 0.1, c) ==
            feller::sample_increment(ca, 0.1, d));
  }
}

TEST_CASE("mixture increments in the blend zone match the blended exponent") {
  const auto fam = feller::preset_bpc();
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.5 * i);
  RngStream rng(2025);
  const auto rep = feller::ecf_test(fam, -5.0, 0.1, 20000, grid, rng);
  REQUIRE(rep.sup_error <= rep.threshold);
}

TEST_CASE("mixture cumulants agree with finite differences of the exponent") {
  const auto fam = feller::preset_bpc();
  const double h = 0.1;
  for (double x : {-10.0, -5.0, 0.0}) {
    const auto c = fam.cumulants_at(x, h);
    auto psi = [&fam, x](double xi) { return fam.exponent_at(x, xi); };
    REQUIRE(*c.mean == Catch::Approx(h * oracle::fd_mean_rate(psi)).margin(1e-6));
    REQUIRE(*c.variance == Catch::Approx(h * oracle::fd_var_rate(psi)).margin(1e-6));
  }
  // any state touching the Cauchy component has no moments
  for (double x : {5.0, 10.0}) {
    const auto cc = fam.cumulants_at(x, h);
    REQUIRE_FALSE(cc.mean.has_value());
    REQUIRE_FALSE(cc.variance.has_value());
  }
}

TEST_CASE("single-component mixture with unit weight is the component") {
  const auto fam = feller::make_mixture({LevySpec::nig(1.0, -0.25, 1.0, 0.0)},
                                        {constant_weight(1.0)});
  RngStream rng(9);
  for (int i = 0; i < 100; ++i) {
    const double x = 100.0 * (rng.uniform() - 0.5);
    const double xi = 40.0 * (rng.uniform() - 0.5);
    REQUIRE(fam.exponent_at(x, xi) ==
            eval_exponent(LevySpec::nig(1.0, -0.25, 1.0, 0.0), xi));
  }
}

TEST_CASE("separated regions enforce the gap against epsilon") {
  using feller::Interval;
  std::vector<std::pair<std::vector<Interval>, LevySpec>> close{
      {{Interval{0.0, 1.0}}, LevySpec::brownian()},
      {{Interval{2.0, 3.0}}, LevySpec::cauchy()}};
  bool threw = false;
  try {
    feller::make_separated_regions(close, 2.0);
  } catch (const std::invalid_argument& e) {
    threw = true;
    const std::string msg = e.what();
    REQUIRE(msg.find("distance") != std::string::npos);
    REQUIRE(msg.find("1") != std::string::npos);
  }
  REQUIRE(threw);

  // gap exactly epsilon is accepted (the flagship preset sits at this edge)
  REQUIRE_NOTHROW(feller::make_separated_regions(close, 1.0));
}

TEST_CASE("single region gives unit weight on the region") {
  const auto fam = feller::make_separated_regions(
      {{{feller::Interval{-1.0, 1.0}}, LevySpec::brownian()}}, 0.5);
  for (double xi : kXiProbe) {
    REQUIRE(fam.exponent_at(0.0, xi) == eval_exponent(LevySpec::brownian(), xi));
  }
  // away from the region the weight decays to zero and the exponent vanishes
  REQUIRE(fam.exponent_at(10.0, 1.0) == Complex(0.0, 0.0));
}

TEST_CASE("negative weights are rejected at evaluation time") {
  const auto fam = feller::make_mixture({LevySpec::brownian()},
                                        {constant_weight(-1.0)});
  REQUIRE_THROWS_AS(fam.exponent_at(0.0, 1.0), std::domain_error);
  RngStream rng(4);
  REQUIRE_THROWS_AS(fam.sample_increment(0.0, 0.1, rng), std::domain_error);
}

TEST_CASE("stable-like family with constant unit index reduces to Cauchy") {
  const auto fam = feller::make_stable_like([](double) { return 1.0; }, 1.0, 1.0);
  RngStream a(21), b(22);
  std::vector<double> fam_draws(8000), cauchy_draws(8000);
  const double h = 0.1;
  for (auto& v : fam_draws) v = fam.sample_increment(3.0, h, a);
  for (auto& v : cauchy_draws) {
    v = feller::sample_increment(LevySpec::cauchy(), h, b);
  }
  const auto ks = feller::ks_two_sample(fam_draws, cauchy_draws);
  REQUIRE(ks.p_value > 0.001);
}

TEST_CASE("preset stable-like index function hits its pinned values") {
  REQUIRE(feller::stable_like_alpha(0.0) == 1.0);
  REQUIRE(feller::stable_like_alpha(1.0) == oracle::frozen::stable_like_alpha_1);
  REQUIRE(feller::stable_like_alpha(2.0) == 1.95);
  REQUIRE(feller::stable_like_alpha(4.0) == 1.0);
  REQUIRE(feller::stable_like_alpha(-2.0) == 1.95);
  const auto fam = feller::preset_stable_like();
  REQUIRE(fam.id() == "paper-stable-like");
  for (double xi : kXiProbe) {
    REQUIRE(fam.exponent_at(1.0, xi) ==
            Complex(std::pow(std::abs(xi), 1.475), 0.0));
  }
}

TEST_CASE("stable-like construction rejects an index that leaves its bounds") {
  bool threw = false;
  try {
    feller::make_stable_like([](double x) { return 1.0 + x / 100.0; }, 1.0, 1.2);
  } catch (const std::invalid_argument& e) {
    threw = true;
    REQUIRE(std::string(e.what()).find("x=") != std::string::npos);
  }
  REQUIRE(threw);
  REQUIRE_THROWS_AS(feller::make_stable_like([](double) { return 1.0; }, 0.0, 1.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(feller::make_stable_like([](double) { return 1.0; }, 1.0, 2.0),
                    std::invalid_argument);
}

TEST_CASE("nig-like preset carries the reverting skew") {
  REQUIRE(feller::nig_like_beta(10.0) == oracle::frozen::nig_like_beta_10);
  REQUIRE(feller::nig_like_beta(0.0) == 0.0);
  const auto fam = feller::preset_nig_like();
  REQUIRE(fam.id() == "paper-nig-like");
  const double b10 = feller::nig_like_beta(10.0);
  for (double xi : kXiProbe) {
    REQUIRE(fam.exponent_at(10.0, xi) ==
            eval_exponent(LevySpec::nig(1.0, b10, 1.0, 0.0), xi));
  }
  const auto c = fam.cumulants_at(10.0, 1.0);
  REQUIRE(*c.mean == Catch::Approx(oracle::frozen::nig_like_drift_10).epsilon(1e-12));
}

TEST_CASE("nig-like margins are enforced at construction") {
  auto one = [](double) { return 1.0; };
  auto big_beta = [](double) { return 0.9999; };
  REQUIRE_THROWS_AS(
      feller::make_nig_like(one, big_beta, one, [](double) { return 0.0; }, 1e-3),
      std::invalid_argument);
  auto tiny_delta = [](double) { return 1e-6; };
  REQUIRE_THROWS_AS(
      feller::make_nig_like(one, [](double) { return 0.0; }, tiny_delta,
                            [](double) { return 0.0; }, 1e-3),
      std::invalid_argument);
}

TEST_CASE("meixner-like preset is symmetric and peaks at the origin") {
  REQUIRE(feller::meixner_like_a(0.0) == oracle::frozen::meixner_like_a0);
  REQUIRE(feller::meixner_like_a(5.0) == 1.0);
  REQUIRE(feller::meixner_like_a(8.0) == 1.0);
  const auto fam = feller::preset_meixner_like();
  REQUIRE(fam.id() == "paper-meixner-like");
  for (double x : {-3.0, 0.0, 1.5, 7.0}) {
    for (double xi : kXiProbe) {
      const Complex p = fam.exponent_at(x, xi);
      REQUIRE(std::abs(p.imag()) < 1e-14);  // b = m = 0: symmetric law
      REQUIRE(p.real() >= 0.0);
    }
  }
}

TEST_CASE("meixner-like margins are enforced at construction") {
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  feller::MeixnerMargins margins;
  margins.a0 = 2.0;  // demand a(x) >= 2 while supplying a == 1
  REQUIRE_THROWS_AS(feller::make_meixner_like(one, zero, one, zero, margins),
                    std::invalid_argument);
  auto wild_b = [](double) { return 3.2; };  // outside (-pi, pi)
  REQUIRE_THROWS_AS(feller::make_meixner_like(one, wild_b, one, zero,
                                              feller::MeixnerMargins{}),
                    std::invalid_argument);
}

TEST_CASE("bump weights respect their declared Lipschitz constant") {
  const auto fam = feller::preset_bpc();
  RngStream rng(654);
  for (const auto& f : fam.model().functions()) {
    REQUIRE(f.declared_lipschitz.has_value());
    REQUIRE(*f.declared_lipschitz == 0.5);  // 1/epsilon with epsilon = 2
    for (int i = 0; i < 200; ++i) {
      const double x = 40.0 * (rng.uniform() - 0.5);
      const double y = x + 4.0 * (rng.uniform() - 0.5);
      REQUIRE(std::abs(f.fn(x) - f.fn(y)) <=
              *f.declared_lipschitz * std::abs(x - y) + 1e-12);
      REQUIRE(f.fn(x) >= 0.0);
      REQUIRE(f.fn(x) <= 1.0);
    }
  }
}

TEST_CASE("drift-field families are deterministic with zero variance") {
  const auto fam = feller::make_drift_field([](double x) { return x; });
  RngStream rng(3);
  const auto checkpoint = RngStream(3).next_u64();
  REQUIRE(fam.sample_increment(2.0, 0.25, rng) == 0.5);
  REQUIRE(rng.next_u64() == checkpoint);  // no randomness consumed
  const auto c = fam.cumulants_at(2.0, 0.25);
  REQUIRE(*c.mean == 0.5);
  REQUIRE(*c.variance == 0.0);
  for (double xi : kXiProbe) {
    REQUIRE(fam.exponent_at(3.0, xi) == Complex(0.0, -3.0 * xi));
  }
}

TEST_CASE("unknown preset names list the valid ones") {
  bool threw = false;
  try {
    feller::make_preset("paper-bpcx");
  } catch (const std::invalid_argument& e) {
    threw = true;
    REQUIRE(std::string(e.what()).find("paper-bpc") != std::string::npos);
    REQUIRE(std::string(e.what()).find("paper-meixner-like") != std::string::npos);
  }
  REQUIRE(threw);
}

TEST_CASE("family rejects non-finite state or bad step") {
  const auto fam = feller::preset_bpc();
  RngStream rng(1);
  REQUIRE_THROWS_AS(fam.exponent_at(std::nan(""), 1.0), std::domain_error);
  REQUIRE_THROWS_AS(fam.sample_increment(0.0, 0.0, rng), std::domain_error);
  REQUIRE_THROWS_AS(fam.sample_increment(0.0, -0.1, rng), std::domain_error);
}

TEST_CASE("empty and mismatched mixture inputs are construction errors") {
  REQUIRE_THROWS_AS(feller::make_mixture({}, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(
      feller::make_mixture({LevySpec::brownian()},
                           {constant_weight(1.0), constant_weight(1.0)}),
      std::invalid_argument);
}

namespace {

std::vector<double> coarse_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / double(n - 1);
  }
  return g;
}

}  // namespace

TEST_CASE("validator accepts the flagship preset") {
  const auto rep = feller::validate_family(feller::preset_bpc(),
                                           coarse_grid(-50, 50, 201),
                                           coarse_grid(-100, 100, 401));
  REQUIRE(rep.positivity_ok);
  REQUIRE(rep.growth_bounded);
  REQUIRE(rep.range_violations.empty());
  REQUIRE_FALSE(rep.has_warnings());
  REQUIRE(*rep.min_weight_sum >= 1.0 - 1e-12);
}

TEST_CASE("validator flags the unbounded linear drift field") {
  const auto fam = feller::make_drift_field([](double x) { return x; });
  const auto rep = feller::validate_family(fam, coarse_grid(-100, 100, 201),
                                           coarse_grid(-100, 100, 401));
  REQUIRE_FALSE(rep.growth_bounded);
  REQUIRE(rep.has_warnings());
  REQUIRE(rep.growth_constant_doubled > 1.5 * rep.growth_constant);
  // linear growth is not superlinear: no overflow note
  for (const auto& n : rep.notes) {
    REQUIRE(n.find("superlinearly") == std::string::npos);
  }
}

TEST_CASE("validator warns that quadratic drift can overflow") {
  const auto fam = feller::make_drift_field([](double x) { return x * x; });
  const auto rep = feller::validate_family(fam, coarse_grid(-100, 100, 201),
                                           coarse_grid(-100, 100, 401));
  REQUIRE_FALSE(rep.growth_bounded);
  bool found = false;
  for (const auto& n : rep.notes) {
    found = found || n.find("superlinearly") != std::string::npos;
  }
  REQUIRE(found);
}

TEST_CASE("validator detects a non-Lipschitz coefficient by refinement") {
  const auto fam = feller::make_drift_field([](double x) {
    return (x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0)) * std::sqrt(std::abs(x));
  });
  const auto rep = feller::validate_family(fam, coarse_grid(-10, 10, 201),
                                           coarse_grid(-10, 10, 401));
  bool diverges = false;
  for (const auto& l : rep.lipschitz_estimates) {
    diverges = diverges || l.diverges_under_refinement;
  }
  REQUIRE(diverges);
  REQUIRE(rep.has_warnings());
}

TEST_CASE("validator reports lost positivity when all weights vanish") {
  feller::WeightFunction w;
  w.eval = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
  w.declared_lipschitz = 1.0;
  const auto fam = feller::make_mixture({LevySpec::brownian()}, {w});
  const auto rep = feller::validate_family(fam, coarse_grid(-10, 10, 201),
                                           coarse_grid(-10, 10, 401));
  REQUIRE_FALSE(rep.positivity_ok);
  REQUIRE(*rep.min_weight_sum == 0.0);
  REQUIRE(rep.has_warnings());
}

TEST_CASE("validator surfaces parameter range violations on the wide grid") {
  // alpha touches 2 outside the construction grid's coverage at x = 60
  const auto fam = feller::make_stable_like(
      [](double x) { return std::abs(x) < 55.0 ? 1.5 : 2.5; }, 1.0, 1.9);
  const auto rep = feller::validate_family(fam, coarse_grid(-60, 60, 241),
                                           coarse_grid(-10, 10, 401));
  REQUIRE_FALSE(rep.range_violations.empty());
  REQUIRE(rep.has_warnings());
}

TEST_CASE("report renders to text and key-value form") {
  const auto rep = feller::validate_family(feller::preset_bpc(),
                                           coarse_grid(-50, 50, 101),
                                           coarse_grid(-100, 100, 201));
  const std::string text = feller::format_text(rep);
  REQUIRE(text.find("positivity_ok: true") != std::string::npos);
  REQUIRE(text.find("growth_bounded: true") != std::string::npos);
  REQUIRE(text.find("uniqueness") != std::string::npos);  // standing caveat
  const std::string kv = feller::format_kv(rep);
  REQUIRE(kv.find("growth_bounded=true") != std::string::npos);
  REQUIRE(kv.find("positivity_ok=true") != std::string::npos);
  const std::string line = feller::summary_line(rep);
  REQUIRE(line.find("growth_bounded=true") != std::string::npos);
}
