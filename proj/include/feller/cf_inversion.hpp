#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

using ExponentFn = std::function<Complex(double)>;

struct InversionConfig {
  double xi_max = 64.0;       // integration truncation
  int n_xi = 4096;            // quadrature intervals (Simpson, made even)
  double x_min = -12.0;
  double x_max = 12.0;
  int n_x = 2048;             // table resolution
  double tail_mass_tol = 1e-3;
};

// Raised when the requested support window leaves more than tail_mass_tol
// of probability outside one of its edges.
class window_error : public std::runtime_error {
 public:
  enum class Edge { lower, upper };

  window_error(Edge edge, double mass, double tol)
      : std::runtime_error(std::string("support window too small at the ") +
                           (edge == Edge::lower ? "lower" : "upper") +
                           " edge: tail mass " + std::to_string(mass) +
                           " exceeds tolerance " + std::to_string(tol)),
        edge(edge),
        tail_mass(mass) {}

  Edge edge;
  double tail_mass;
};

// Tabulated distribution function of one increment law, built by numerical
// inversion of its characteristic function. Immutable after construction;
// doubles as an inverse-CDF sampling oracle.
struct CdfTable {
  std::vector<double> grid;  // sorted x values
  std::vector<double> cdf;   // nondecreasing, in [0,1]
  InversionConfig config;
  std::string source_id;
  double monotonicity_defect = 0.0;  // worst backstep before monotonization
  bool quadrature_warning = false;   // defect exceeded 1e-3
};

namespace detail {

inline void check_inversion_config(const InversionConfig& cfg) {
  require(cfg.xi_max > 0, "InversionConfig: xi_max must be positive");
  require(cfg.n_xi >= 256, "InversionConfig: n_xi must be at least 256");
  require(cfg.x_min < cfg.x_max, "InversionConfig: x_min must be below x_max");
  require(cfg.n_x >= 512, "InversionConfig: n_x must be at least 512");
  require(cfg.tail_mass_tol > 0 && cfg.tail_mass_tol <= 0.01,
          "InversionConfig: tail_mass_tol must lie in (0, 0.01]");
}

inline void check_hermitian(const ExponentFn& psi, double xi_scale) {
  for (double frac : {0.23, 0.57, 0.91}) {
    const double xi = frac * xi_scale;
    const Complex a = psi(xi);
    const Complex b = psi(-xi);
    const double err = std::abs(b - std::conj(a));
    require_domain(err <= 1e-9 * (1.0 + std::abs(a)),
                   "exponent is not hermitian: psi(-xi) != conj(psi(xi))");
  }
}

// Gil-Pelaez: F(x) = 1/2 - (1/pi) \int_0^inf Im[e^{-i xi x} phi(xi)] / xi dxi
// with phi = exp(-h psi). Composite Simpson on [0, xi_max]; the xi -> 0
// limit of the integrand is -x - h Im psi'(0), evaluated by a central
// difference of psi at 0.
inline std::vector<double> gil_pelaez_cdf(const ExponentFn& psi, double h,
                                          const std::vector<double>& xs,
                                          double xi_max, int n_xi) {
  if (n_xi % 2 != 0) ++n_xi;
  const double dxi = xi_max / n_xi;

  std::vector<Complex> phi(static_cast<std::size_t>(n_xi) + 1);
  for (int j = 0; j <= n_xi; ++j) {
    phi[static_cast<std::size_t>(j)] = std::exp(-h * psi(dxi * j));
  }

  const double fd_step = 1e-4;
  const Complex dpsi0 = (psi(fd_step) - psi(-fd_step)) / (2.0 * fd_step);
  const double slope0_base = -h * dpsi0.imag();

  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    // e^{-i xi_j x} by rotation recurrence; one trig pair per x.
    const Complex rot(std::cos(dxi * x), -std::sin(dxi * x));
    Complex w(1.0, 0.0);
    double sum = 0.0;
    for (int j = 0; j <= n_xi; ++j) {
      double g;
      if (j == 0) {
        g = -x + slope0_base;
      } else {
        g = (w * phi[static_cast<std::size_t>(j)]).imag() / (dxi * j);
      }
      const double weight = (j == 0 || j == n_xi) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      sum += weight * g;
      w *= rot;
    }
    const double integral = sum * dxi / 3.0;
    out[k] = 0.5 - integral / 3.14159265358979323846;
  }
  return out;
}

// Running maximum, clamped to [0,1]. Returns the worst backstep seen.
inline double monotonize(std::vector<double>& f) {
  double defect = 0.0;
  double running = -std::numeric_limits<double>::infinity();
  for (double& v : f) {
    if (v < running) {
      defect = std::max(defect, running - v);
      v = running;
    } else {
      running = v;
    }
    v = std::min(1.0, std::max(0.0, v));
    running = std::min(1.0, std::max(0.0, running));
  }
  return defect;
}

}  // namespace detail

// Builds the table on a uniform grid over [cfg.x_min, cfg.x_max], honoring
// the config exactly. Throws window_error if the tail mass outside either
// edge exceeds cfg.tail_mass_tol.
inline CdfTable build_cdf_table(const ExponentFn& exponent, double h,
                                const InversionConfig& cfg,
                                std::string source_id = {}) {
  require_domain(h > 0, "build_cdf_table: h must be positive");
  detail::check_inversion_config(cfg);
  detail::check_hermitian(exponent, cfg.xi_max);

  CdfTable table;
  table.config = cfg;
  table.source_id = std::move(source_id);
  table.grid.resize(static_cast<std::size_t>(cfg.n_x));
  const double dx = (cfg.x_max - cfg.x_min) / (cfg.n_x - 1);
  for (int i = 0; i < cfg.n_x; ++i) {
    table.grid[static_cast<std::size_t>(i)] = cfg.x_min + dx * i;
  }
  table.cdf = detail::gil_pelaez_cdf(exponent, h, table.grid, cfg.xi_max, cfg.n_xi);
  table.monotonicity_defect = detail::monotonize(table.cdf);
  table.quadrature_warning = table.monotonicity_defect > 1e-3;

  if (table.cdf.front() > cfg.tail_mass_tol) {
    throw window_error(window_error::Edge::lower, table.cdf.front(), cfg.tail_mass_tol);
  }
  if (1.0 - table.cdf.back() > cfg.tail_mass_tol) {
    throw window_error(window_error::Edge::upper, 1.0 - table.cdf.back(), cfg.tail_mass_tol);
  }
  return table;
}

// Interpolated distribution function.
inline double cdf_at(const CdfTable& t, double x) {
  if (x <= t.grid.front()) return t.cdf.front();
  if (x >= t.grid.back()) return t.cdf.back();
  const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.grid.begin());
  const double x0 = t.grid[i - 1], x1 = t.grid[i];
  const double f0 = t.cdf[i - 1], f1 = t.cdf[i];
  return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
}

// Monotone-interpolated quantile. Levels outside the tabulated range clamp
// to the window edges (the documented truncation bias).
inline double inverse_cdf(const CdfTable& t, double u) {
  if (u <= t.cdf.front()) return t.grid.front();
  if (u >= t.cdf.back()) return t.grid.back();
  const auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - t.cdf.begin());
  if (i == 0) return t.grid.front();
  const double f0 = t.cdf[i - 1], f1 = t.cdf[i];
  if (f1 <= f0) return t.grid[i];
  const double x0 = t.grid[i - 1], x1 = t.grid[i];
  return x0 + (x1 - x0) * (u - f0) / (f1 - f0);
}

inline double inverse_cdf_sample(const CdfTable& t, RngStream& rng) {
  return inverse_cdf(t, rng.uniform());
}

// Finite-difference derivative of the monotonized CDF; nonnegative by
// construction.
inline double density_at(const CdfTable& t, double x) {
  require_domain(x >= t.grid.front() && x <= t.grid.back(),
                 "density_at: x outside the table window");
  const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
  std::size_t i = static_cast<std::size_t>(it - t.grid.begin());
  if (i == 0) i = 1;
  if (i >= t.grid.size()) i = t.grid.size() - 1;
  const std::size_t lo = (i >= 2) ? i - 2 : i - 1;
  const std::size_t hi = (i + 1 < t.grid.size()) ? i + 1 : i;
  return (t.cdf[hi] - t.cdf[lo]) / (t.grid[hi] - t.grid[lo]);
}

inline void write_csv(const CdfTable& t, std::ostream& os) {
  os << "x,F\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    os << t.grid[i] << ',' << t.cdf[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Automatic table construction: window selection, truncation selection, and
// an equal-probability-mass grid so heavy-tailed laws keep quantile accuracy
// near the center of mass.

struct AutoTableOptions {
  std::optional<double> mean;    // finite per-increment moments, if known
  std::optional<double> stddev;
  std::function<double(RngStream&)> pilot_sampler;  // fallback window source
  std::optional<std::pair<double, double>> window;  // explicit override
  int n_x = 2048;
  double tail_mass_tol = 1e-3;
  std::string source_id;
};

namespace detail {

// Doubling scan for a truncation point xi_max such that the neglected
// Gil-Pelaez tail, bounded by |phi(X)| / (pi p) for decay rate p, stays
// below 1e-6. Laws whose characteristic function does not decay (lattice or
// degenerate) are rejected.
inline double select_xi_max(const ExponentFn& psi, double h) {
  double prev_mod = 1.0;
  for (double x = 1.0; x <= 3.0e7; x *= 2.0) {
    const double mod = std::exp(-h * psi(x).real());
    const double p = std::max(0.1, std::log(std::max(prev_mod, 1e-300) /
                                            std::max(mod, 1e-300)) / std::log(2.0));
    if (mod / (3.14159265358979323846 * p) <= 1e-6) return x;
    prev_mod = mod;
  }
  throw std::domain_error(
      "cf_inversion: characteristic function decays too slowly for table "
      "inversion (lattice, degenerate, or extremely heavy-density law)");
}

inline int select_n_xi(double xi_max, double x_abs_max) {
  const double points_per_period = 16.0;
  const double dxi = 2.0 * 3.14159265358979323846 /
                     (points_per_period * std::max(x_abs_max, 1.0));
  int n = static_cast<int>(std::ceil(xi_max / dxi));
  n = std::max(n, 256);
  n = std::min(n, 2'000'000);
  if (n % 2 != 0) ++n;
  return n;
}

}  // namespace detail

// Window source precedence: explicit window, then mean +- 12 sd when both
// moments are finite, then empirical quantiles of 1000 pilot draws (heavy
// tails). The window is then widened, up to 8 doublings, until the computed
// tail mass at both edges is within tolerance.
inline CdfTable build_cdf_table_auto(const ExponentFn& exponent, double h,
                                     AutoTableOptions opts = {}) {
  require_domain(h > 0, "build_cdf_table_auto: h must be positive");
  require(opts.n_x >= 512, "AutoTableOptions: n_x must be at least 512");
  require(opts.tail_mass_tol > 0 && opts.tail_mass_tol <= 0.01,
          "AutoTableOptions: tail_mass_tol must lie in (0, 0.01]");

  double lo, hi;
  if (opts.window) {
    lo = opts.window->first;
    hi = opts.window->second;
    require(lo < hi, "AutoTableOptions: empty window");
  } else if (opts.mean && opts.stddev && *opts.stddev > 0) {
    lo = *opts.mean - 12.0 * *opts.stddev;
    hi = *opts.mean + 12.0 * *opts.stddev;
  } else if (opts.pilot_sampler) {
    // Fixed pilot seed: the table must be a pure function of its inputs.
    RngStream pilot(0x9D2C5680u);
    std::vector<double> draws(1000);
    for (double& d : draws) d = opts.pilot_sampler(pilot);
    std::sort(draws.begin(), draws.end());
    const double q = std::max(opts.tail_mass_tol, 0.005);
    const double ql = draws[static_cast<std::size_t>(q * (draws.size() - 1))];
    const double qh = draws[static_cast<std::size_t>((1.0 - q) * (draws.size() - 1))];
    const double center = draws[draws.size() / 2];
    lo = center - 3.0 * (center - ql);
    hi = center + 3.0 * (qh - center);
    if (!(lo < hi)) {
      lo = center - 1.0;
      hi = center + 1.0;
    }
  } else {
    throw std::invalid_argument(
        "build_cdf_table_auto: no moments, pilot sampler, or window given; "
        "an explicit support window is required");
  }

  detail::check_hermitian(exponent, 8.0);
  const double xi_max = detail::select_xi_max(exponent, h);

  const int scan_n = 513;
  std::vector<double> scan_x, scan_f;
  for (int attempt = 0;; ++attempt) {
    const double x_abs = std::max(std::abs(lo), std::abs(hi));
    const int n_xi = detail::select_n_xi(xi_max, x_abs);
    scan_x.resize(scan_n);
    for (int i = 0; i < scan_n; ++i) {
      scan_x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (scan_n - 1);
    }
    scan_f = detail::gil_pelaez_cdf(exponent, h, scan_x, xi_max, n_xi);
    detail::monotonize(scan_f);
    const bool lo_ok = scan_f.front() <= opts.tail_mass_tol;
    const bool hi_ok = 1.0 - scan_f.back() <= opts.tail_mass_tol;
    if (lo_ok && hi_ok) break;
    if (attempt >= 8) {
      if (!lo_ok) {
        throw window_error(window_error::Edge::lower, scan_f.front(), opts.tail_mass_tol);
      }
      throw window_error(window_error::Edge::upper, 1.0 - scan_f.back(), opts.tail_mass_tol);
    }
    const double mid = 0.5 * (lo + hi);
    if (!lo_ok) lo = mid - 2.0 * (mid - lo);
    if (!hi_ok) hi = mid + 2.0 * (hi - mid);
  }

  // Equal-mass grid from the scan: quantile nodes at uniform CDF levels
  // between the edge values, so cell mass (hence interpolation error of the
  // final table) is roughly constant.
  CdfTable scan;
  scan.grid = scan_x;
  scan.cdf = scan_f;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(opts.n_x));
  const double f_lo = scan_f.front(), f_hi = scan_f.back();
  for (int i = 0; i < opts.n_x; ++i) {
    const double u = f_lo + (f_hi - f_lo) * i / (opts.n_x - 1);
    xs.push_back(inverse_cdf(scan, u));
  }
  xs.front() = lo;
  xs.back() = hi;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const double x_abs = std::max(std::abs(lo), std::abs(hi));
  const int n_xi = detail::select_n_xi(xi_max, x_abs);

  CdfTable table;
  table.grid = std::move(xs);
  table.cdf = detail::gil_pelaez_cdf(exponent, h, table.grid, xi_max, n_xi);
  table.monotonicity_defect = detail::monotonize(table.cdf);
  table.quadrature_warning = table.monotonicity_defect > 1e-3;
  table.source_id = std::move(opts.source_id);
  table.config.xi_max = xi_max;
  table.config.n_xi = n_xi;
  table.config.x_min = lo;
  table.config.x_max = hi;
  table.config.n_x = static_cast<int>(table.grid.size());
  table.config.tail_mass_tol = opts.tail_mass_tol;

  if (table.cdf.front() > opts.tail_mass_tol) {
    throw window_error(window_error::Edge::lower, table.cdf.front(), opts.tail_mass_tol);
  }
  if (1.0 - table.cdf.back() > opts.tail_mass_tol) {
    throw window_error(window_error::Edge::upper, 1.0 - table.cdf.back(), opts.tail_mass_tol);
  }
  return table;
}

}  // namespace feller
