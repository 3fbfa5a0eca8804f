#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "feller/cf_inversion.hpp"
#include "feller/levy.hpp"
#include "feller/rng.hpp"
#include "feller/stats.hpp"
#include "oracles.hpp"

using feller::build_cdf_table;
using feller::build_cdf_table_auto;
using feller::CdfTable;
using feller::Complex;
using feller::InversionConfig;
using feller::LevySpec;
using feller::RngStream;

namespace {

feller::ExponentFn exponent_of(const LevySpec& spec) {
  return [spec](double xi) { return feller::eval_exponent(spec, xi); };
}

CdfTable brownian_table(double h = 1.0) {
  feller::AutoTableOptions opt;
  opt.mean = 0.0;
  opt.stddev = std::sqrt(h);
  opt.source_id = "brownian";
  return build_cdf_table_auto(exponent_of(LevySpec::brownian()), h, opt);
}

}  // namespace

TEST_CASE("brownian table reproduces the normal CDF and quantiles") {
  const auto t = brownian_table(1.0);
  REQUIRE(t.quadrature_warning == false);
  REQUIRE(std::abs(feller::cdf_at(t, 0.0) - 0.5) < 1e-6);
  for (double x : {-2.0, -1.0, -0.3, 0.4, 1.0, 2.3}) {
    REQUIRE(std::abs(feller::cdf_at(t, x) - oracle::normal_cdf(x)) < 1e-4);
  }
  for (double p : {0.01, 0.1, 0.25, 0.5, 0.9, 0.99}) {
    REQUIRE(std::abs(feller::inverse_cdf(t, p) - oracle::normal_quantile(p)) < 1e-3);
  }
}

TEST_CASE("cdf is monotone with vanishing defect and clamped tails") {
  const auto t = brownian_table(1.0);
  REQUIRE(t.monotonicity_defect < 1e-9);
  for (std::size_t i = 1; i < t.cdf.size(); ++i) REQUIRE(t.cdf[i] >= t.cdf[i - 1]);
  REQUIRE(t.cdf.front() <= 1e-3);
  REQUIRE(t.cdf.back() >= 1.0 - 1e-3);
  REQUIRE(feller::cdf_at(t, -1e9) == 0.0);
  REQUIRE(feller::cdf_at(t, 1e9) == 1.0);
}

TEST_CASE("cauchy density comes out of the table") {
  feller::AutoTableOptions opt;
  opt.pilot_sampler = [](RngStream& r) {
    return feller::sample_increment(LevySpec::cauchy(), 1.0, r);
  };
  const auto t = build_cdf_table_auto(exponent_of(LevySpec::cauchy()), 1.0, opt);
  REQUIRE(std::abs(feller::density_at(t, 0.0) - 1.0 / M_PI) < 1e-2);
  REQUIRE(std::abs(feller::cdf_at(t, 1.0) - 0.75) < 2e-3);
  REQUIRE(std::abs(feller::cdf_at(t, 0.0) - 0.5) < 2e-3);
}

TEST_CASE("symmetric laws give symmetric quantiles") {
  feller::AutoTableOptions opt;
  opt.mean = 0.0;
  opt.stddev = std::sqrt(2.0 * 0.5);
  const auto t =
      build_cdf_table_auto(exponent_of(LevySpec::symmetric_stable(2.0)), 0.5, opt);
  for (double p : {0.05, 0.1, 0.25, 0.4}) {
    REQUIRE(std::abs(feller::inverse_cdf(t, p) + feller::inverse_cdf(t, 1.0 - p)) <
            2e-3);
  }
}

TEST_CASE("meixner table moments match analytic cumulants") {
  const auto spec = LevySpec::meixner(1.3, 0.5, 0.8, 0.2);
  const double h = 0.5;
  const auto c = feller::analytic_cumulants(spec, h);
  const auto t = feller::make_increment_table(spec, h);
  // integrate x and x^2 against the table's increments
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 1; i < t.grid.size(); ++i) {
    const double mass = t.cdf[i] - t.cdf[i - 1];
    const double mid = 0.5 * (t.grid[i] + t.grid[i - 1]);
    mean += mass * mid;
    second += mass * mid * mid;
  }
  REQUIRE(std::abs(mean - *c.mean) < 1e-3 * (1.0 + std::abs(*c.mean)));
  // midpoint sums plus the default tail truncation leave ~1e-2 in x^2
  const double var = second - mean * mean;
  REQUIRE(std::abs(var - *c.variance) < 2e-2 * (1.0 + *c.variance));
}

TEST_CASE("table sampling matches direct samplers in law") {
  struct Case {
    LevySpec spec;
    double h;
  };
  const Case cases[] = {{LevySpec::brownian(), 1.0},
                        {LevySpec::cauchy(), 1.0},
                        {LevySpec::symmetric_stable(1.5), 1.0},
                        {LevySpec::gamma_process(feller::JumpDirection::up), 2.0},
                        {LevySpec::nig(1.0, -0.25, 1.0, 0.0), 1.0}};
  for (const auto& kase : cases) {
    const auto t = feller::make_increment_table(kase.spec, kase.h);
    RngStream ra(42), rb(43);
    std::vector<double> via_table(5000), direct(5000);
    for (auto& v : via_table) v = feller::inverse_cdf_sample(t, ra);
    for (auto& v : direct) v = feller::sample_increment(kase.spec, kase.h, rb);
    const auto ks = feller::ks_two_sample(via_table, direct);
    INFO(kase.spec.name() << " p=" << ks.p_value);
    REQUIRE(ks.p_value > 0.01);
  }
}

TEST_CASE("quadrature is converged: doubling resolution moves nothing") {
  for (const auto& spec :
       {LevySpec::brownian(), LevySpec::meixner(1.0, 0.0, 1.0, 0.0)}) {
    const double h = 1.0;
    feller::AutoTableOptions opt;
    const auto c = feller::analytic_cumulants(spec, h);
    opt.mean = *c.mean;
    opt.stddev = std::sqrt(*c.variance);
    const auto base = build_cdf_table_auto(exponent_of(spec), h, opt);

    InversionConfig cfg = base.config;
    cfg.xi_max *= 2.0;
    cfg.n_xi *= 2;
    const auto fine = build_cdf_table(exponent_of(spec), h, cfg);
    double worst = 0.0;
    for (double x : {-2.0, -0.5, 0.0, 0.7, 1.9}) {
      worst = std::max(worst,
                       std::abs(feller::cdf_at(base, x) - feller::cdf_at(fine, x)));
    }
    INFO(spec.name());
    REQUIRE(worst < 1e-4);
  }
}

TEST_CASE("a window that clips real mass names the failing edge") {
  InversionConfig cfg;
  cfg.xi_max = 64.0;
  cfg.n_xi = 4096;
  cfg.n_x = 512;
  cfg.x_min = -0.1;  // normal mass below -0.1 is ~46%
  cfg.x_max = 8.0;
  bool threw = false;
  try {
    build_cdf_table(exponent_of(LevySpec::brownian()), 1.0, cfg);
  } catch (const feller::window_error& e) {
    threw = true;
    REQUIRE(e.edge == feller::window_error::Edge::lower);
    REQUIRE(e.tail_mass > 0.1);
  }
  REQUIRE(threw);

  cfg.x_min = -8.0;
  cfg.x_max = 0.1;
  try {
    build_cdf_table(exponent_of(LevySpec::brownian()), 1.0, cfg);
    FAIL("expected window_error");
  } catch (const feller::window_error& e) {
    REQUIRE(e.edge == feller::window_error::Edge::upper);
  }
}

TEST_CASE("non-hermitian exponents are rejected") {
  auto bogus = [](double xi) { return Complex(0.0, xi * xi); };
  REQUIRE_THROWS_AS(build_cdf_table(bogus, 1.0, InversionConfig{}),
                    std::domain_error);
}

TEST_CASE("lattice and degenerate laws are rejected by the CF decay scan") {
  feller::AutoTableOptions opt;
  opt.mean = 0.1;
  opt.stddev = std::sqrt(0.1);
  REQUIRE_THROWS_AS(
      build_cdf_table_auto(exponent_of(LevySpec::poisson(feller::JumpDirection::up)),
                           0.1, opt),
      std::domain_error);
  feller::AutoTableOptions dopt;
  dopt.mean = 0.05;
  dopt.stddev = 1.0;
  REQUIRE_THROWS_AS(
      build_cdf_table_auto(exponent_of(LevySpec::deterministic_drift(0.5)), 0.1,
                           dopt),
      std::domain_error);
}

TEST_CASE("increment table helper rejects lattice laws the same way") {
  REQUIRE_THROWS_AS(
      feller::make_increment_table(LevySpec::poisson(feller::JumpDirection::down),
                                   0.1),
      std::domain_error);
}

TEST_CASE("config validation rejects malformed requests") {
  InversionConfig cfg;
  cfg.n_xi = 8;
  REQUIRE_THROWS_AS(build_cdf_table(exponent_of(LevySpec::brownian()), 1.0, cfg),
                    std::invalid_argument);
  cfg = InversionConfig{};
  cfg.x_min = 2.0;
  cfg.x_max = -2.0;
  REQUIRE_THROWS_AS(build_cdf_table(exponent_of(LevySpec::brownian()), 1.0, cfg),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_cdf_table(exponent_of(LevySpec::brownian()), 0.0,
                                    InversionConfig{}),
                    std::domain_error);
}

TEST_CASE("inverse_cdf clamps to the window outside the covered mass") {
  const auto t = brownian_table(1.0);
  REQUIRE(feller::inverse_cdf(t, 0.0) == t.grid.front());
  REQUIRE(feller::inverse_cdf(t, 1.0) == t.grid.back());
}

TEST_CASE("table round trips through CSV text") {
  const auto t = brownian_table(1.0);
  std::ostringstream os;
  feller::write_csv(t, os);
  const std::string text = os.str();
  REQUIRE(text.substr(0, 4) == "x,F\n");
  std::size_t rows = 0;
  for (char ch : text) rows += (ch == '\n');
  REQUIRE(rows == t.grid.size() + 1);
}
