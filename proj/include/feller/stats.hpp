#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "feller/euler.hpp"
#include "feller/family.hpp"
#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

inline std::vector<Complex> empirical_cf(const std::vector<double>& samples,
                                         const std::vector<double>& xi_grid) {
  require_domain(!samples.empty(), "empirical_cf: no samples");
  std::vector<Complex> out(xi_grid.size());
  for (std::size_t j = 0; j < xi_grid.size(); ++j) {
    const double xi = xi_grid[j];
    double re = 0.0, im = 0.0;
    for (double s : samples) {
      re += std::cos(xi * s);
      im += std::sin(xi * s);
    }
    const double n = static_cast<double>(samples.size());
    out[j] = Complex(re / n, im / n);
  }
  return out;
}

struct EcfReport {
  std::vector<double> xi_grid;
  std::vector<Complex> ecf;
  std::vector<Complex> target;  // e^{-h psi}
  double sup_error = 0.0;
  double threshold = 0.0;  // 5/sqrt(N)
  bool pass = false;
};

// Compares the empirical characteristic function of the samples with the
// model CF e^{-h psi(xi)} in sup norm over the grid. The 5/sqrt(N) bar gives
// 5-sigma headroom over the single-point CLT standard error.
inline EcfReport ecf_report(const std::vector<double>& samples,
                            const std::vector<double>& xi_grid,
                            const std::function<Complex(double)>& exponent, double h) {
  EcfReport r;
  r.xi_grid = xi_grid;
  r.ecf = empirical_cf(samples, xi_grid);
  r.target.resize(xi_grid.size());
  for (std::size_t j = 0; j < xi_grid.size(); ++j) {
    r.target[j] = std::exp(-h * exponent(xi_grid[j]));
    r.sup_error = std::max(r.sup_error, std::abs(r.ecf[j] - r.target[j]));
  }
  r.threshold = 5.0 / std::sqrt(static_cast<double>(samples.size()));
  r.pass = r.sup_error <= r.threshold;
  return r;
}

// Draws N one-step increments of the family at state x and checks them
// against the family's own exponent there.
inline EcfReport ecf_test(const FellerFamily& family, double x, double h,
                          std::size_t N, const std::vector<double>& xi_grid,
                          RngStream& rng) {
  require(N >= 1000, "ecf_test: need at least 1000 samples");
  std::vector<double> samples(N);
  for (double& s : samples) s = family.sample_increment(x, h, rng);
  return ecf_report(samples, xi_grid,
                    [&family, x](double xi) { return family.exponent_at(x, xi); }, h);
}

// Survival function of the Kolmogorov distribution, both series branches,
// terms truncated below 1e-10.
inline double kolmogorov_p(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    const double pi = 3.14159265358979323846;
    double sum = 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-10) break;
    }
    const double cdf = std::sqrt(2.0 * pi) / lambda * sum;
    return std::min(1.0, std::max(0.0, 1.0 - cdf));
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 64; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-10) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov with asymptotic p-value.
inline KsResult ks_test(std::vector<double> samples,
                        const std::function<double(double)>& cdf) {
  require(samples.size() >= 10, "ks_test: need at least 10 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  double prev = -1e-12;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    require_domain(f >= prev - 1e-12,
                   "ks_test: cdf is not monotone on the sample points");
    prev = f;
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(f - lo, hi - f));
  }
  return {d, kolmogorov_p(std::sqrt(n) * d)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(a.size() >= 10 && b.size() >= 10, "ks_two_sample: need at least 10 samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, kolmogorov_p(std::sqrt(n_eff) * d)};
}

struct EnsembleStats {
  std::vector<double> eval_times;
  std::vector<double> mean;
  std::vector<std::optional<double>> variance;  // undefined for a single path
  static constexpr std::array<double, 5> levels{0.01, 0.25, 0.5, 0.75, 0.99};
  std::vector<std::array<double, 5>> quantiles;
  int n_paths = 0;
};

// Lower empirical quantile: the order statistic at ceil(q n).
inline double empirical_quantile(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), "empirical_quantile: empty sample");
  const double n = static_cast<double>(sorted.size());
  long idx = static_cast<long>(std::ceil(q * n)) - 1;
  idx = std::max(0l, std::min(idx, static_cast<long>(sorted.size()) - 1));
  return sorted[static_cast<std::size_t>(idx)];
}

// Cross-sectional statistics at the nearest grid time <= eval time.
inline EnsembleStats ensemble_stats(const std::vector<SamplePath>& paths,
                                    const std::vector<double>& eval_times) {
  require(!paths.empty(), "ensemble_stats: no paths");
  double horizon = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) {
    require(!p.times.empty(), "ensemble_stats: empty path");
    horizon = std::min(horizon, p.times.back());
  }
  EnsembleStats out;
  out.eval_times = eval_times;
  out.n_paths = static_cast<int>(paths.size());
  for (double t : eval_times) {
    require_domain(t >= 0.0 && t <= horizon + 1e-12,
                   "ensemble_stats: eval time beyond the common path horizon");
    std::vector<double> cross(paths.size());
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const double h = paths[p].config.h;
      std::size_t idx = static_cast<std::size_t>(std::floor(t / h + 1e-9));
      idx = std::min(idx, paths[p].values.size() - 1);
      cross[p] = paths[p].values[idx];
    }
    double m = 0.0;
    for (double v : cross) m += v;
    m /= static_cast<double>(cross.size());
    out.mean.push_back(m);
    if (cross.size() >= 2) {
      double s2 = 0.0;
      for (double v : cross) s2 += (v - m) * (v - m);
      out.variance.push_back(s2 / static_cast<double>(cross.size() - 1));
    } else {
      out.variance.push_back(std::nullopt);
    }
    std::sort(cross.begin(), cross.end());
    std::array<double, 5> qs{};
    for (std::size_t k = 0; k < qs.size(); ++k) {
      qs[k] = empirical_quantile(cross, EnsembleStats::levels[k]);
    }
    out.quantiles.push_back(qs);
  }
  return out;
}

struct DriftEstimate {
  double state = 0.0;
  double empirical_drift = 0.0;
  std::optional<double> analytic_drift;
  double std_error = 0.0;
};

// Per-state one-step drift: mean increment over N draws divided by h, with
// the cumulant-oracle drift where the mean exists.
inline std::vector<DriftEstimate> mean_reversion_diagnostic(
    const FellerFamily& family, const std::vector<double>& states, double h,
    std::size_t N, RngStream& rng) {
  require(N >= 1000, "mean_reversion_diagnostic: need at least 1000 samples");
  require_domain(h > 0.0, "mean_reversion_diagnostic: h must be positive");
  std::vector<DriftEstimate> out;
  for (double x : states) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double z = family.sample_increment(x, h, rng);
      sum += z;
      sum2 += z * z;
    }
    const double n = static_cast<double>(N);
    const double m = sum / n;
    const double var = std::max(0.0, (sum2 - n * m * m) / (n - 1.0));
    DriftEstimate est;
    est.state = x;
    est.empirical_drift = m / h;
    est.std_error = std::sqrt(var / n) / h;
    const Cumulants c = family.cumulants_at(x, h);
    if (c.mean) est.analytic_drift = *c.mean / h;
    out.push_back(est);
  }
  return out;
}

}  // namespace feller
