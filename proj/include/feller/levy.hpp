#pragma once

#include <cmath>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>

#include "feller/cf_inversion.hpp"
#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

enum class ProcessKind {
  brownian,
  poisson,
  cauchy,
  symmetric_stable,
  gamma,
  nig,
  meixner,
  deterministic_drift,
};

enum class JumpDirection { up, down };

// A named Lévy process under the convention E e^{i xi L_t} = e^{-t psi(xi)}.
// Construct through the factories; parameter ranges are enforced there.
struct LevySpec {
  ProcessKind kind = ProcessKind::brownian;
  JumpDirection direction = JumpDirection::up;  // poisson, gamma
  double alpha = 0.0;                           // symmetric_stable, nig
  double beta = 0.0, delta = 0.0, mu = 0.0;     // nig
  double a = 0.0, b = 0.0, r = 0.0, m = 0.0;    // meixner
  double c = 0.0;                               // deterministic_drift slope

  static LevySpec brownian() { return LevySpec{}; }

  static LevySpec poisson(JumpDirection dir = JumpDirection::up) {
    LevySpec s;
    s.kind = ProcessKind::poisson;
    s.direction = dir;
    return s;
  }

  static LevySpec cauchy() {
    LevySpec s;
    s.kind = ProcessKind::cauchy;
    return s;
  }

  static LevySpec symmetric_stable(double alpha) {
    require(alpha > 0.0 && alpha <= 2.0,
            "SymmetricStable: alpha must lie in (0, 2]");
    LevySpec s;
    s.kind = ProcessKind::symmetric_stable;
    s.alpha = alpha;
    return s;
  }

  static LevySpec gamma_process(JumpDirection dir = JumpDirection::up) {
    LevySpec s;
    s.kind = ProcessKind::gamma;
    s.direction = dir;
    return s;
  }

  static LevySpec nig(double alpha, double beta, double delta, double mu) {
    require(alpha > 0.0, "NIG: alpha must be positive");
    require(std::abs(beta) < alpha, "NIG: |beta| must be below alpha");
    require(delta > 0.0, "NIG: delta must be positive");
    require(std::isfinite(mu), "NIG: mu must be finite");
    LevySpec s;
    s.kind = ProcessKind::nig;
    s.alpha = alpha;
    s.beta = beta;
    s.delta = delta;
    s.mu = mu;
    return s;
  }

  static LevySpec meixner(double a, double b, double r, double m) {
    require(a > 0.0, "Meixner: a must be positive");
    require(b > -3.14159265358979323846 && b < 3.14159265358979323846,
            "Meixner: b must lie in (-pi, pi)");
    require(r > 0.0, "Meixner: r must be positive");
    require(std::isfinite(m), "Meixner: m must be finite");
    LevySpec s;
    s.kind = ProcessKind::meixner;
    s.a = a;
    s.b = b;
    s.r = r;
    s.m = m;
    return s;
  }

  static LevySpec deterministic_drift(double c) {
    require(std::isfinite(c), "DeterministicDrift: slope must be finite");
    LevySpec s;
    s.kind = ProcessKind::deterministic_drift;
    s.c = c;
    return s;
  }

  std::string name() const {
    std::ostringstream os;
    switch (kind) {
      case ProcessKind::brownian: return "Brownian";
      case ProcessKind::poisson:
        os << "Poisson(" << (direction == JumpDirection::up ? "up" : "down") << ")";
        break;
      case ProcessKind::cauchy: return "Cauchy";
      case ProcessKind::symmetric_stable:
        os << "SymmetricStable(alpha=" << alpha << ")";
        break;
      case ProcessKind::gamma:
        os << "Gamma(" << (direction == JumpDirection::up ? "up" : "down") << ")";
        break;
      case ProcessKind::nig:
        os << "NIG(alpha=" << alpha << ",beta=" << beta << ",delta=" << delta
           << ",mu=" << mu << ")";
        break;
      case ProcessKind::meixner:
        os << "Meixner(a=" << a << ",b=" << b << ",r=" << r << ",m=" << m << ")";
        break;
      case ProcessKind::deterministic_drift:
        os << "DeterministicDrift(c=" << c << ")";
        break;
    }
    return os.str();
  }
};

namespace detail {

// log(cosh(w)) without overflow for large |Re w|. The arguments used here
// always have Re cosh(w) > 0, so the principal branch is continuous.
inline Complex log_cosh(Complex w) {
  const Complex s = (w.real() >= 0.0) ? w : -w;
  if (s.real() < 20.0) return std::log(std::cosh(s));
  return s - std::log(2.0) + std::exp(-2.0 * s);
}

}  // namespace detail

inline Complex eval_exponent(const LevySpec& spec, double xi) {
  require_domain(std::isfinite(xi), "eval_exponent: xi must be finite");
  if (xi == 0.0) return Complex(0.0, 0.0);
  Complex out;
  switch (spec.kind) {
    case ProcessKind::brownian:
      out = Complex(0.5 * xi * xi, 0.0);
      break;
    case ProcessKind::poisson:
      // up: 1 - e^{i xi}; down: 1 - e^{-i xi}
      out = (spec.direction == JumpDirection::up)
                ? Complex(1.0 - std::cos(xi), -std::sin(xi))
                : Complex(1.0 - std::cos(xi), std::sin(xi));
      break;
    case ProcessKind::cauchy:
      out = Complex(std::abs(xi), 0.0);
      break;
    case ProcessKind::symmetric_stable:
      out = Complex(std::pow(std::abs(xi), spec.alpha), 0.0);
      break;
    case ProcessKind::gamma:
      // up (increasing subordinator): ln(1 - i xi); down: ln(1 + i xi)
      out = Complex(0.5 * std::log1p(xi * xi),
                    (spec.direction == JumpDirection::up) ? -std::atan(xi)
                                                          : std::atan(xi));
      break;
    case ProcessKind::nig: {
      const double gamma0 = std::sqrt(spec.alpha * spec.alpha - spec.beta * spec.beta);
      // alpha^2 - (beta + i xi)^2 has positive real part, principal sqrt safe
      const Complex root = std::sqrt(
          Complex(gamma0 * gamma0 + xi * xi, -2.0 * spec.beta * xi));
      out = Complex(0.0, -spec.mu * xi) + spec.delta * (root - gamma0);
      break;
    }
    case ProcessKind::meixner: {
      const Complex w(0.5 * spec.a * xi, -0.5 * spec.b);
      out = 2.0 * spec.r * (detail::log_cosh(w) - std::log(std::cos(0.5 * spec.b))) +
            Complex(0.0, -spec.m * xi);
      break;
    }
    case ProcessKind::deterministic_drift:
      out = Complex(0.0, -spec.c * xi);
      break;
  }
  require_domain(std::isfinite(out.real()) && std::isfinite(out.imag()),
                 "eval_exponent: overflow evaluating " + spec.name());
  return out;
}

namespace detail {

inline long sample_poisson_count(double lambda, RngStream& rng) {
  long total = 0;
  while (lambda > 30.0) {
    lambda -= 30.0;
    const double limit = std::exp(-30.0);
    double p = rng.uniform();
    while (p > limit) {
      ++total;
      p *= rng.uniform();
    }
  }
  const double limit = std::exp(-lambda);
  double p = rng.uniform();
  while (p > limit) {
    ++total;
    p *= rng.uniform();
  }
  return total;
}

// Chambers-Mallows-Stuck, symmetric case. Exact for all alpha in (0,2];
// alpha=1 reduces to tan(V) (Cauchy) and alpha=2 to 2 sin(V) sqrt(W),
// a Gaussian with variance 2.
inline double sample_stable_std(double alpha, RngStream& rng) {
  const double v = 3.14159265358979323846 * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(v);
  const double cv = std::cos(v);
  return std::sin(alpha * v) / std::pow(cv, 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

// Marsaglia-Tsang, unit rate. Shapes below 1 are boosted and corrected by
// the U^{1/shape} factor.
inline double sample_gamma_std(double shape, RngStream& rng) {
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v;
  }
}

// Michael-Schucany-Haas.
inline double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
  const double n = rng.gaussian();
  const double y = n * n;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) *
                       std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  if (rng.uniform() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

// Process-wide Meixner table cache: least-recently-used, capacity 256,
// parameters quantized to 1e-3 (tables are built from the quantized values
// so a cached table is exact for its key). The step size h is kept exact.
// The cache is synchronized; a sampler draw consumes exactly one uniform
// regardless of cache state, so ensembles stay deterministic.
class MeixnerTableCache {
 public:
  using Key = std::tuple<long long, long long, long long, long long, double>;

  std::shared_ptr<const CdfTable> get(double a, double b, double r, double m,
                                      double h) {
    const Key key{quantize(a), quantize(b), quantize(r), quantize(m), h};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto it = entries_.find(key);
      if (it != entries_.end()) {
        order_.splice(order_.begin(), order_, it->second.second);
        return it->second.first;
      }
    }
    const auto table = build(key);
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) return it->second.first;
    order_.push_front(key);
    entries_.emplace(key, std::make_pair(table, order_.begin()));
    if (entries_.size() > 256) {
      entries_.erase(order_.back());
      order_.pop_back();
    }
    return table;
  }

 private:
  static long long quantize(double v) { return std::llround(v * 1000.0); }

  static std::shared_ptr<const CdfTable> build(const Key& key);

  std::mutex mutex_;
  std::list<Key> order_;
  std::map<Key, std::pair<std::shared_ptr<const CdfTable>, std::list<Key>::iterator>>
      entries_;
};

inline MeixnerTableCache& meixner_table_cache() {
  static MeixnerTableCache cache;
  return cache;
}

}  // namespace detail

inline Cumulants analytic_cumulants(const LevySpec& spec, double h) {
  require_domain(h > 0.0, "analytic_cumulants: h must be positive");
  switch (spec.kind) {
    case ProcessKind::brownian:
      return {0.0, h};
    case ProcessKind::poisson:
      return {(spec.direction == JumpDirection::up) ? h : -h, h};
    case ProcessKind::cauchy:
      return {std::nullopt, std::nullopt};
    case ProcessKind::symmetric_stable:
      if (spec.alpha == 2.0) return {0.0, 2.0 * h};
      if (spec.alpha > 1.0) return {0.0, std::nullopt};
      return {std::nullopt, std::nullopt};
    case ProcessKind::gamma:
      return {(spec.direction == JumpDirection::up) ? h : -h, h};
    case ProcessKind::nig: {
      const double gamma0 = std::sqrt(spec.alpha * spec.alpha - spec.beta * spec.beta);
      return {h * (spec.mu + spec.delta * spec.beta / gamma0),
              h * spec.delta * spec.alpha * spec.alpha / (gamma0 * gamma0 * gamma0)};
    }
    case ProcessKind::meixner: {
      const double t = std::tan(0.5 * spec.b);
      const double cs = std::cos(0.5 * spec.b);
      return {h * (spec.m + spec.a * spec.r * t),
              h * spec.a * spec.a * spec.r / (2.0 * cs * cs)};
    }
    case ProcessKind::deterministic_drift:
      return {spec.c * h, 0.0};
  }
  return {};
}

// Builds a CDF table for the increment L_h of a catalog process. The support
// window comes from its cumulants when both are finite, otherwise from pilot
// draws of the closed-form sampler. Lattice (Poisson) and degenerate (drift)
// laws have no decaying characteristic function and are rejected.
inline CdfTable make_increment_table(const LevySpec& spec, double h,
                                     int n_x = 2048, double tail_mass_tol = 1e-3);

inline double sample_increment(const LevySpec& spec, double h, RngStream& rng) {
  require_domain(h > 0.0, "sample_increment: h must be positive");
  switch (spec.kind) {
    case ProcessKind::brownian:
      return std::sqrt(h) * rng.gaussian();
    case ProcessKind::poisson: {
      const double n = static_cast<double>(detail::sample_poisson_count(h, rng));
      return (spec.direction == JumpDirection::up) ? n : -n;
    }
    case ProcessKind::cauchy:
      return h * std::tan(3.14159265358979323846 * (rng.uniform() - 0.5));
    case ProcessKind::symmetric_stable:
      return std::pow(h, 1.0 / spec.alpha) * detail::sample_stable_std(spec.alpha, rng);
    case ProcessKind::gamma: {
      const double g = detail::sample_gamma_std(h, rng);
      return (spec.direction == JumpDirection::up) ? g : -g;
    }
    case ProcessKind::nig: {
      const double gamma0 = std::sqrt(spec.alpha * spec.alpha - spec.beta * spec.beta);
      const double z = detail::sample_inverse_gaussian(spec.delta * h / gamma0,
                                                       spec.delta * spec.delta * h * h,
                                                       rng);
      return spec.mu * h + spec.beta * z + std::sqrt(z) * rng.gaussian();
    }
    case ProcessKind::meixner: {
      const auto table =
          detail::meixner_table_cache().get(spec.a, spec.b, spec.r, spec.m, h);
      return inverse_cdf_sample(*table, rng);
    }
    case ProcessKind::deterministic_drift:
      return spec.c * h;
  }
  return 0.0;
}

inline CdfTable make_increment_table(const LevySpec& spec, double h, int n_x,
                                     double tail_mass_tol) {
  require_domain(h > 0.0, "make_increment_table: h must be positive");
  AutoTableOptions opts;
  opts.n_x = n_x;
  opts.tail_mass_tol = tail_mass_tol;
  std::ostringstream id;
  id << spec.name() << ",h=" << h;
  opts.source_id = id.str();
  const Cumulants cum = analytic_cumulants(spec, h);
  if (cum.mean && cum.variance && *cum.variance > 0.0) {
    opts.mean = *cum.mean;
    opts.stddev = std::sqrt(*cum.variance);
  } else if (spec.kind != ProcessKind::meixner) {
    opts.pilot_sampler = [spec, h](RngStream& rng) {
      return sample_increment(spec, h, rng);
    };
  }
  return build_cdf_table_auto(
      [spec](double xi) { return eval_exponent(spec, xi); }, h, std::move(opts));
}

namespace detail {

inline std::shared_ptr<const CdfTable> MeixnerTableCache::build(const Key& key) {
  const LevySpec spec = LevySpec::meixner(
      static_cast<double>(std::get<0>(key)) / 1000.0,
      static_cast<double>(std::get<1>(key)) / 1000.0,
      static_cast<double>(std::get<2>(key)) / 1000.0,
      static_cast<double>(std::get<3>(key)) / 1000.0);
  return std::make_shared<const CdfTable>(
      make_increment_table(spec, std::get<4>(key)));
}

}  // namespace detail

}  // namespace feller
