#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "feller/family.hpp"
#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

struct LipschitzEstimate {
  std::string name;
  double empirical = 0.0;
  std::optional<double> declared;
  bool within_declared = true;
  bool diverges_under_refinement = false;
};

// Advisory report; validation never blocks simulation.
struct ValidationReport {
  bool positivity_ok = true;
  std::optional<double> min_weight_sum;    // mixtures only
  std::optional<double> min_weight_sum_x;  // where the minimum occurs
  std::vector<LipschitzEstimate> lipschitz_estimates;
  double growth_constant = 0.0;
  double growth_constant_doubled = 0.0;
  bool growth_bounded = true;
  std::vector<std::string> range_violations;
  std::vector<std::string> notes;

  bool has_warnings() const {
    if (!positivity_ok || !growth_bounded) return true;
    if (!range_violations.empty() || !notes.empty()) return true;
    for (const auto& l : lipschitz_estimates) {
      if (!l.within_declared || l.diverges_under_refinement) return true;
    }
    return false;
  }
};

inline std::vector<double> default_x_grid() {
  std::vector<double> g(1001);
  for (int i = 0; i < 1001; ++i) g[static_cast<std::size_t>(i)] = -50.0 + 0.1 * i;
  return g;
}

inline std::vector<double> default_xi_grid() {
  std::vector<double> g(2001);
  for (int i = 0; i < 2001; ++i) g[static_cast<std::size_t>(i)] = -100.0 + 0.1 * i;
  return g;
}

namespace detail {

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

// Doubled extent around the grid center and doubled point count.
inline std::vector<double> doubled_grid(const std::vector<double>& g) {
  const double mid = 0.5 * (g.front() + g.back());
  const double half = (g.back() - g.front());
  return uniform_grid(mid - half, mid + half, 2 * g.size() - 1);
}

inline double growth_sup(const FellerFamily& family, const std::vector<double>& xs,
                         const std::vector<double>& xis,
                         std::vector<std::string>* violations) {
  double sup = 0.0;
  for (double x : xs) {
    for (double xi : xis) {
      try {
        const double v = std::abs(family.exponent_at(x, xi)) / (1.0 + xi * xi);
        sup = std::max(sup, v);
      } catch (const std::domain_error& e) {
        if (violations && violations->size() < 16) violations->push_back(e.what());
      }
    }
  }
  return sup;
}

inline double lipschitz_sup(const std::function<double(double)>& fn,
                            const std::vector<double>& xs, RngStream& rng) {
  double sup = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d = xs[i + 1] - xs[i];
    if (d <= 0.0) continue;
    const double q = std::abs(fn(xs[i + 1]) - fn(xs[i])) / d;
    if (std::isfinite(q)) sup = std::max(sup, q);
  }
  const double lo = xs.front(), hi = xs.back();
  for (int k = 0; k < 100; ++k) {
    const double x = lo + (hi - lo) * rng.uniform();
    const double y = lo + (hi - lo) * rng.uniform();
    if (std::abs(x - y) < 1e-9) continue;
    const double q = std::abs(fn(x) - fn(y)) / std::abs(x - y);
    if (std::isfinite(q)) sup = std::max(sup, q);
  }
  return sup;
}

}  // namespace detail

// Grid evaluation of the family's standing assumptions: weight positivity,
// the growth bound sup_x |psi_x(xi)| <= C (1+xi^2), empirical Lipschitz
// constants vs declared ones, and parameter range margins. growth_bounded
// holds when the observed constant is stable (within 5%) under doubling both
// grids' extent and resolution.
inline ValidationReport validate_family(const FellerFamily& family,
                                        std::vector<double> x_grid = default_x_grid(),
                                        std::vector<double> xi_grid = default_xi_grid()) {
  require(x_grid.size() >= 2 && xi_grid.size() >= 2,
          "validate_family: grids need at least 2 points");
  for (double v : x_grid) require(std::isfinite(v), "validate_family: non-finite x grid");
  for (double v : xi_grid) require(std::isfinite(v), "validate_family: non-finite xi grid");
  std::sort(x_grid.begin(), x_grid.end());
  std::sort(xi_grid.begin(), xi_grid.end());

  ValidationReport report;
  const auto& model = family.model();

  // positivity of the weight sum (mixtures)
  for (double x : x_grid) {
    const auto s = model.weight_sum(x);
    if (!s) break;
    if (!report.min_weight_sum || *s < *report.min_weight_sum) {
      report.min_weight_sum = *s;
      report.min_weight_sum_x = x;
    }
  }
  if (report.min_weight_sum && !(*report.min_weight_sum > 0.0)) {
    report.positivity_ok = false;
    std::ostringstream os;
    os << "weight sum is " << *report.min_weight_sum << " at x="
       << *report.min_weight_sum_x;
    report.notes.push_back(os.str());
  }

  // growth constant and its stability under grid doubling
  report.growth_constant =
      detail::growth_sup(family, x_grid, xi_grid, &report.range_violations);
  report.growth_constant_doubled =
      detail::growth_sup(family, detail::doubled_grid(x_grid),
                         detail::doubled_grid(xi_grid), &report.range_violations);
  const double change = std::abs(report.growth_constant_doubled - report.growth_constant);
  report.growth_bounded = std::isfinite(report.growth_constant) &&
                          std::isfinite(report.growth_constant_doubled) &&
                          change <= 0.05 * std::max(report.growth_constant, 1e-12);
  if (!report.growth_bounded) {
    std::ostringstream os;
    os << "growth constant moved from " << report.growth_constant << " to "
       << report.growth_constant_doubled
       << " under grid doubling; |psi_x(xi)| is not bounded by C(1+xi^2) uniformly";
    report.notes.push_back(os.str());
  }

  // empirical Lipschitz constants, with a refinement check near singular points
  RngStream pair_rng(1234);
  const auto refined = detail::uniform_grid(x_grid.front(), x_grid.back(),
                                            2 * x_grid.size() - 1);
  for (const auto& nf : model.functions()) {
    LipschitzEstimate est;
    est.name = nf.name;
    RngStream rng1 = pair_rng.substream(0);
    RngStream rng2 = pair_rng.substream(1);
    est.empirical = detail::lipschitz_sup(nf.fn, x_grid, rng1);
    const double refined_sup = detail::lipschitz_sup(nf.fn, refined, rng2);
    est.declared = nf.declared_lipschitz;
    if (est.declared) {
      est.within_declared = est.empirical <= *est.declared * (1.0 + 1e-9);
      if (!est.within_declared) {
        report.notes.push_back("function " + nf.name +
                               " exceeds its declared Lipschitz constant");
      }
    }
    if (refined_sup > 1.2 * est.empirical + 1e-12) {
      est.diverges_under_refinement = true;
      std::ostringstream os;
      os << "function " << nf.name << ": difference quotients grow from "
         << est.empirical << " to " << refined_sup
         << " under grid refinement (possible non-Lipschitz point)";
      report.notes.push_back(os.str());
      est.empirical = refined_sup;
    }
    report.lipschitz_estimates.push_back(std::move(est));

    // weight range checks against declared bounds
    if (nf.declared_bound) {
      for (double x : x_grid) {
        const double v = nf.fn(x);
        if (!(std::isfinite(v) && v >= 0.0 && v <= *nf.declared_bound * (1.0 + 1e-9))) {
          std::ostringstream os;
          os << "function " << nf.name << " value " << v << " at x=" << x
             << " outside [0," << *nf.declared_bound << "]";
          report.range_violations.push_back(os.str());
          break;
        }
      }
    }
  }

  // declared parameter margins (parametric families)
  for (double x : x_grid) {
    for (auto& v : model.range_violations(x)) {
      if (report.range_violations.size() < 16) report.range_violations.push_back(v);
    }
    if (report.range_violations.size() >= 16) break;
  }

  // superlinear drift warns about finite-time overflow of sample paths
  if (model.family_kind() == "drift-field") {
    const auto fns = model.functions();
    if (!fns.empty()) {
      const auto& a = fns.front().fn;
      auto scaled_sup = [&a](const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s = std::max(s, std::abs(a(x)) / (1.0 + std::abs(x)));
        return s;
      };
      const double base = scaled_sup(x_grid);
      const double doubled = scaled_sup(detail::doubled_grid(x_grid));
      if (doubled > 1.05 * base + 1e-12) {
        report.notes.push_back(
            "drift grows superlinearly in x; sample paths can overflow in finite "
            "time and are then truncated with an overflow marker");
      }
    }
  }

  return report;
}

inline std::string format_text(const ValidationReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "validation report\n";
  os << "  positivity_ok: " << (r.positivity_ok ? "true" : "false");
  if (r.min_weight_sum) {
    os << "  (min weight sum " << *r.min_weight_sum << " at x=" << *r.min_weight_sum_x
       << ")";
  }
  os << "\n";
  os << "  growth_bounded: " << (r.growth_bounded ? "true" : "false")
     << "  (constant " << r.growth_constant << ", doubled grids "
     << r.growth_constant_doubled << ")\n";
  for (const auto& l : r.lipschitz_estimates) {
    os << "  lipschitz " << l.name << ": empirical " << l.empirical;
    if (l.declared) {
      os << ", declared " << *l.declared << (l.within_declared ? " (ok)" : " (EXCEEDED)");
    }
    if (l.diverges_under_refinement) os << " [diverges under refinement]";
    os << "\n";
  }
  if (!r.range_violations.empty()) {
    os << "  range violations:\n";
    for (const auto& v : r.range_violations) os << "    - " << v << "\n";
  }
  if (!r.notes.empty()) {
    os << "  notes:\n";
    for (const auto& n : r.notes) os << "    - " << n << "\n";
  }
  os << "  caveat: convergence of the scheme additionally requires uniqueness of "
        "the limiting process for its generator; this is not verifiable "
        "numerically and is not checked here.\n";
  return os.str();
}

inline std::string format_kv(const ValidationReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "positivity_ok=" << (r.positivity_ok ? "true" : "false") << "\n";
  if (r.min_weight_sum) {
    os << "min_weight_sum=" << *r.min_weight_sum << "\n";
    os << "min_weight_sum_x=" << *r.min_weight_sum_x << "\n";
  }
  os << "growth_constant=" << r.growth_constant << "\n";
  os << "growth_constant_doubled=" << r.growth_constant_doubled << "\n";
  os << "growth_bounded=" << (r.growth_bounded ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < r.lipschitz_estimates.size(); ++i) {
    const auto& l = r.lipschitz_estimates[i];
    const std::string p = "lipschitz." + std::to_string(i + 1) + ".";
    os << p << "name=" << l.name << "\n";
    os << p << "empirical=" << l.empirical << "\n";
    if (l.declared) os << p << "declared=" << *l.declared << "\n";
    os << p << "within_declared=" << (l.within_declared ? "true" : "false") << "\n";
    os << p << "diverges=" << (l.diverges_under_refinement ? "true" : "false") << "\n";
  }
  os << "range_violations=" << r.range_violations.size() << "\n";
  for (std::size_t i = 0; i < r.range_violations.size(); ++i) {
    os << "range_violation." << i + 1 << "=" << r.range_violations[i] << "\n";
  }
  os << "notes=" << r.notes.size() << "\n";
  for (std::size_t i = 0; i < r.notes.size(); ++i) {
    os << "note." << i + 1 << "=" << r.notes[i] << "\n";
  }
  os << "warnings=" << (r.has_warnings() ? "1" : "0") << "\n";
  return os.str();
}

inline std::string summary_line(const ValidationReport& r) {
  std::ostringstream os;
  os << "positivity_ok=" << (r.positivity_ok ? "true" : "false")
     << " growth_bounded=" << (r.growth_bounded ? "true" : "false")
     << " range_violations=" << r.range_violations.size()
     << " notes=" << r.notes.size();
  return os.str();
}

}  // namespace feller
