#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "feller/levy.hpp"
#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

// Nonnegative bounded Lipschitz weight x -> alpha(x) with declared constants.
struct WeightFunction {
  std::function<double(double)> eval;
  double declared_lipschitz = 0.0;
  double declared_bound = 1.0;
  std::string description;
};

namespace detail {

struct NamedFn {
  std::string name;
  std::function<double(double)> fn;
  std::optional<double> declared_lipschitz;
  std::optional<double> declared_bound;
};

// Implementation backbone of a family (psi_x)_x. Models are immutable after
// construction and shareable across threads.
class FamilyModel {
 public:
  virtual ~FamilyModel() = default;
  virtual Complex exponent_at(double x, double xi) const = 0;
  virtual double sample_increment(double x, double h, RngStream& rng) const = 0;
  virtual Cumulants cumulants_at(double x, double h) const = 0;
  virtual std::string describe() const = 0;
  virtual std::string family_kind() const = 0;
  // introspection for validation and plotting
  virtual std::vector<NamedFn> functions() const { return {}; }
  virtual std::optional<double> weight_sum(double) const { return std::nullopt; }
  virtual std::vector<std::string> range_violations(double) const { return {}; }
};

inline std::vector<double> construction_grid() {
  std::vector<double> g(1001);
  for (int i = 0; i < 1001; ++i) g[static_cast<std::size_t>(i)] = -50.0 + 0.1 * i;
  return g;
}

}  // namespace detail

// Value handle for a family of Lévy exponents (psi_x)_{x in R}; evaluates the
// exponent at (x, xi) and samples increments of L_h^{(x)}.
class FellerFamily {
 public:
  FellerFamily(std::shared_ptr<const detail::FamilyModel> model, std::string id)
      : model_(std::move(model)), id_(std::move(id)) {
    require(model_ != nullptr, "FellerFamily: null model");
    if (id_.empty()) id_ = model_->describe();
  }

  explicit FellerFamily(std::shared_ptr<const detail::FamilyModel> model)
      : FellerFamily(std::move(model), {}) {}

  Complex exponent_at(double x, double xi) const {
    require_domain(std::isfinite(x), "exponent_at: x must be finite");
    return model_->exponent_at(x, xi);
  }

  double sample_increment(double x, double h, RngStream& rng) const {
    require_domain(std::isfinite(x), "sample_increment: x must be finite");
    require_domain(h > 0.0, "sample_increment: h must be positive");
    return model_->sample_increment(x, h, rng);
  }

  Cumulants cumulants_at(double x, double h) const {
    require_domain(h > 0.0, "cumulants_at: h must be positive");
    return model_->cumulants_at(x, h);
  }

  const std::string& id() const { return id_; }
  const detail::FamilyModel& model() const { return *model_; }
  FellerFamily with_id(std::string id) const { return FellerFamily(model_, std::move(id)); }

 private:
  std::shared_ptr<const detail::FamilyModel> model_;
  std::string id_;
};

namespace detail {

class MixtureModel : public FamilyModel {
 public:
  MixtureModel(std::vector<LevySpec> components, std::vector<WeightFunction> weights)
      : components_(std::move(components)), weights_(std::move(weights)) {}

  Complex exponent_at(double x, double xi) const override {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const double w = weight_at(i, x);
      if (w == 0.0) continue;
      sum += eval_exponent(components_[i], w * xi);
    }
    return sum;
  }

  double sample_increment(double x, double h, RngStream& rng) const override {
    // Components draw sequentially from the caller's stream; weight-zero
    // components are skipped, so on a pure region the draw is exactly the
    // single component's law.
    double z = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const double w = weight_at(i, x);
      if (w == 0.0) continue;
      z += w * feller::sample_increment(components_[i], h, rng);
    }
    return z;
  }

  Cumulants cumulants_at(double x, double h) const override {
    Cumulants out{0.0, 0.0};
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const double w = weight_at(i, x);
      if (w == 0.0) continue;
      const Cumulants c = analytic_cumulants(components_[i], h);
      if (out.mean) {
        if (c.mean) *out.mean += w * *c.mean; else out.mean.reset();
      }
      if (out.variance) {
        if (c.variance) *out.variance += w * w * *c.variance; else out.variance.reset();
      }
    }
    return out;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "mixture[";
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) os << ";";
      os << components_[i].name();
    }
    os << "]";
    return os.str();
  }

  std::string family_kind() const override { return "mixture"; }

  std::vector<NamedFn> functions() const override {
    std::vector<NamedFn> fns;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      NamedFn f;
      f.name = weights_[i].description.empty()
                   ? "weight" + std::to_string(i + 1)
                   : weights_[i].description;
      f.fn = weights_[i].eval;
      f.declared_lipschitz = weights_[i].declared_lipschitz;
      f.declared_bound = weights_[i].declared_bound;
      fns.push_back(std::move(f));
    }
    return fns;
  }

  std::optional<double> weight_sum(double x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weight_at(i, x);
    return s;
  }

  const std::vector<LevySpec>& components() const { return components_; }
  const std::vector<WeightFunction>& weights() const { return weights_; }

 private:
  double weight_at(std::size_t i, double x) const {
    const double w = weights_[i].eval(x);
    require_domain(std::isfinite(w) && w >= 0.0,
                   "mixture weight " + std::to_string(i + 1) +
                       " is negative or non-finite at x=" + std::to_string(x));
    return w;
  }

  std::vector<LevySpec> components_;
  std::vector<WeightFunction> weights_;
};

}  // namespace detail

// psi_x(xi) = sum_i psi^{(i)}(alpha_i(x) xi); increments are the weighted sum
// of independent component increments, equal in law.
inline FellerFamily make_mixture(std::vector<LevySpec> components,
                                 std::vector<WeightFunction> weights) {
  require(!components.empty(), "make_mixture: component list is empty");
  require(components.size() == weights.size(),
          "make_mixture: components and weights differ in length");
  for (const auto& w : weights) {
    require(static_cast<bool>(w.eval), "make_mixture: weight without eval function");
  }
  return FellerFamily(std::make_shared<detail::MixtureModel>(std::move(components),
                                                             std::move(weights)));
}

namespace detail {

inline std::string interval_to_string(const Interval& iv) {
  std::ostringstream os;
  if (std::isinf(iv.lo)) os << "(-inf,"; else os << "[" << iv.lo << ",";
  if (std::isinf(iv.hi)) os << "inf)"; else os << iv.hi << "]";
  return os.str();
}

inline std::string region_to_string(const std::vector<Interval>& region) {
  std::ostringstream os;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (i) os << "u";
    os << interval_to_string(region[i]);
  }
  return os.str();
}

inline double region_distance(const std::vector<Interval>& region, double x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& iv : region) d = std::min(d, iv.distance_to(x));
  return d;
}

inline double region_gap(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& ia : a) {
    for (const auto& ib : b) g = std::min(g, interval_gap(ia, ib));
  }
  return g;
}

}  // namespace detail

// Distance-bump mixture over uniformly separated regions: weight i equals 1
// on K_i, falls off linearly with slope 1/eps, and vanishes on every other
// region. On each K_i the exponent is exactly component i's exponent.
inline FellerFamily make_separated_regions(
    std::vector<std::pair<std::vector<Interval>, LevySpec>> regions, double eps) {
  require(!regions.empty(), "make_separated_regions: no regions given");
  require(eps > 0.0 && std::isfinite(eps),
          "make_separated_regions: eps must be positive and finite");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    require(!regions[i].first.empty(),
            "make_separated_regions: region " + std::to_string(i + 1) + " is empty");
    for (const auto& iv : regions[i].first) {
      require(!std::isnan(iv.lo) && !std::isnan(iv.hi) && iv.lo <= iv.hi,
              "make_separated_regions: invalid interval in region " +
                  std::to_string(i + 1));
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      const double gap = detail::region_gap(regions[i].first, regions[j].first);
      if (gap < eps) {
        std::ostringstream os;
        os << "make_separated_regions: regions " << i + 1 << " "
           << detail::region_to_string(regions[i].first) << " and " << j + 1 << " "
           << detail::region_to_string(regions[j].first) << " are at distance " << gap
           << " < eps=" << eps;
        throw std::invalid_argument(os.str());
      }
    }
  }
  std::vector<LevySpec> components;
  std::vector<WeightFunction> weights;
  for (auto& [region, spec] : regions) {
    WeightFunction w;
    const auto parts = region;
    w.eval = [parts, eps](double x) {
      const double d = detail::region_distance(parts, x);
      return std::min(1.0, std::max(0.0, 1.0 - d / eps));
    };
    w.declared_lipschitz = 1.0 / eps;
    w.declared_bound = 1.0;
    w.description = "bump:" + detail::region_to_string(region);
    components.push_back(spec);
    weights.push_back(std::move(w));
  }
  return make_mixture(std::move(components), std::move(weights));
}

namespace detail {

class StableLikeModel : public FamilyModel {
 public:
  StableLikeModel(std::function<double(double)> alpha_fn, double lo, double hi)
      : alpha_fn_(std::move(alpha_fn)), lo_(lo), hi_(hi) {}

  Complex exponent_at(double x, double xi) const override {
    return eval_exponent(LevySpec::symmetric_stable(alpha_at(x)), xi);
  }

  double sample_increment(double x, double h, RngStream& rng) const override {
    const double alpha = alpha_at(x);
    return std::pow(h, 1.0 / alpha) * sample_stable_std(alpha, rng);
  }

  Cumulants cumulants_at(double x, double h) const override {
    return analytic_cumulants(LevySpec::symmetric_stable(alpha_at(x)), h);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "stable-like[alpha in [" << lo_ << "," << hi_ << "]]";
    return os.str();
  }

  std::string family_kind() const override { return "stable-like"; }

  std::vector<NamedFn> functions() const override {
    return {{"alpha", alpha_fn_, std::nullopt, hi_}};
  }

  std::vector<std::string> range_violations(double x) const override {
    const double a = alpha_fn_(x);
    if (!(std::isfinite(a) && a >= lo_ && a <= hi_)) {
      std::ostringstream os;
      os << "alpha(" << x << ")=" << a << " outside declared [" << lo_ << "," << hi_ << "]";
      return {os.str()};
    }
    return {};
  }

  double alpha_at(double x) const {
    const double a = alpha_fn_(x);
    require_domain(std::isfinite(a) && a >= lo_ && a <= hi_,
                   "stable-like: alpha(x) left its declared range at x=" +
                       std::to_string(x));
    return a;
  }

 private:
  std::function<double(double)> alpha_fn_;
  double lo_, hi_;
};

}  // namespace detail

inline FellerFamily make_stable_like(std::function<double(double)> alpha_fn,
                                     double alpha_lo, double alpha_hi) {
  require(static_cast<bool>(alpha_fn), "make_stable_like: missing alpha function");
  require(0.0 < alpha_lo && alpha_lo <= alpha_hi && alpha_hi < 2.0,
          "make_stable_like: declared bounds must satisfy 0 < lo <= hi < 2");
  for (double x : detail::construction_grid()) {
    const double a = alpha_fn(x);
    if (!(std::isfinite(a) && a >= alpha_lo && a <= alpha_hi)) {
      std::ostringstream os;
      os << "make_stable_like: alpha=" << a << " outside [" << alpha_lo << ","
         << alpha_hi << "] at x=" << x;
      throw std::invalid_argument(os.str());
    }
  }
  return FellerFamily(std::make_shared<detail::StableLikeModel>(std::move(alpha_fn),
                                                                alpha_lo, alpha_hi));
}

namespace detail {

class NigLikeModel : public FamilyModel {
 public:
  NigLikeModel(std::function<double(double)> alpha_fn,
               std::function<double(double)> beta_fn,
               std::function<double(double)> delta_fn,
               std::function<double(double)> mu_fn, double margin)
      : alpha_fn_(std::move(alpha_fn)),
        beta_fn_(std::move(beta_fn)),
        delta_fn_(std::move(delta_fn)),
        mu_fn_(std::move(mu_fn)),
        margin_(margin) {}

  Complex exponent_at(double x, double xi) const override {
    return eval_exponent(spec_at(x), xi);
  }

  double sample_increment(double x, double h, RngStream& rng) const override {
    return feller::sample_increment(spec_at(x), h, rng);
  }

  Cumulants cumulants_at(double x, double h) const override {
    return analytic_cumulants(spec_at(x), h);
  }

  std::string describe() const override { return "nig-like"; }

  std::string family_kind() const override { return "nig-like"; }

  std::vector<NamedFn> functions() const override {
    return {{"alpha", alpha_fn_, std::nullopt, std::nullopt},
            {"beta", beta_fn_, std::nullopt, std::nullopt},
            {"delta", delta_fn_, std::nullopt, std::nullopt},
            {"mu", mu_fn_, std::nullopt, std::nullopt}};
  }

  std::vector<std::string> range_violations(double x) const override {
    std::vector<std::string> out;
    const double a = alpha_fn_(x), b = beta_fn_(x), d = delta_fn_(x);
    std::ostringstream os;
    if (!(std::isfinite(d) && d >= margin_)) {
      os << "delta(" << x << ")=" << d << " below margin " << margin_;
      out.push_back(os.str());
      os.str({});
    }
    if (!(std::isfinite(a) && std::isfinite(b) && a - std::abs(b) >= margin_)) {
      os << "alpha(" << x << ")-|beta(" << x << ")|=" << a - std::abs(b)
         << " below margin " << margin_;
      out.push_back(os.str());
    }
    return out;
  }

  LevySpec spec_at(double x) const {
    const double a = alpha_fn_(x), b = beta_fn_(x), d = delta_fn_(x), u = mu_fn_(x);
    require_domain(std::isfinite(d) && d >= margin_ && std::isfinite(a) &&
                       std::isfinite(b) && a - std::abs(b) >= margin_,
                   "nig-like: parameter margins violated at x=" + std::to_string(x));
    return LevySpec::nig(a, b, d, u);
  }

 private:
  std::function<double(double)> alpha_fn_, beta_fn_, delta_fn_, mu_fn_;
  double margin_;
};

}  // namespace detail

inline FellerFamily make_nig_like(std::function<double(double)> alpha_fn,
                                  std::function<double(double)> beta_fn,
                                  std::function<double(double)> delta_fn,
                                  std::function<double(double)> mu_fn,
                                  double margin = 1e-3) {
  require(alpha_fn && beta_fn && delta_fn && mu_fn,
          "make_nig_like: missing parameter function");
  require(margin > 0.0, "make_nig_like: margin must be positive");
  for (double x : detail::construction_grid()) {
    const double a = alpha_fn(x), b = beta_fn(x), d = delta_fn(x), u = mu_fn(x);
    if (!(std::isfinite(u) && std::isfinite(d) && d >= margin && std::isfinite(a) &&
          std::isfinite(b) && a - std::abs(b) >= margin)) {
      std::ostringstream os;
      os << "make_nig_like: margins violated at x=" << x << " (alpha=" << a
         << ",beta=" << b << ",delta=" << d << ",mu=" << u << ")";
      throw std::invalid_argument(os.str());
    }
  }
  return FellerFamily(std::make_shared<detail::NigLikeModel>(
      std::move(alpha_fn), std::move(beta_fn), std::move(delta_fn), std::move(mu_fn),
      margin));
}

struct MeixnerMargins {
  double a0 = 1e-3;
  double r0 = 1e-3;
  double b_lo = -3.14159265358979323846 + 1e-3;
  double b_hi = 3.14159265358979323846 - 1e-3;
};

namespace detail {

class MeixnerLikeModel : public FamilyModel {
 public:
  MeixnerLikeModel(std::function<double(double)> a_fn,
                   std::function<double(double)> b_fn,
                   std::function<double(double)> r_fn,
                   std::function<double(double)> m_fn, MeixnerMargins margins)
      : a_fn_(std::move(a_fn)),
        b_fn_(std::move(b_fn)),
        r_fn_(std::move(r_fn)),
        m_fn_(std::move(m_fn)),
        margins_(margins) {}

  Complex exponent_at(double x, double xi) const override {
    return eval_exponent(spec_at(x), xi);
  }

  // Increments come from the shared inversion-table cache (parameters
  // quantized to 1e-3 for keying; tables built from the quantized values).
  double sample_increment(double x, double h, RngStream& rng) const override {
    return feller::sample_increment(spec_at(x), h, rng);
  }

  Cumulants cumulants_at(double x, double h) const override {
    return analytic_cumulants(spec_at(x), h);
  }

  std::string describe() const override { return "meixner-like"; }

  std::string family_kind() const override { return "meixner-like"; }

  std::vector<NamedFn> functions() const override {
    return {{"a", a_fn_, std::nullopt, std::nullopt},
            {"b", b_fn_, std::nullopt, std::nullopt},
            {"r", r_fn_, std::nullopt, std::nullopt},
            {"m", m_fn_, std::nullopt, std::nullopt}};
  }

  std::vector<std::string> range_violations(double x) const override {
    std::vector<std::string> out;
    const double a = a_fn_(x), b = b_fn_(x), r = r_fn_(x);
    std::ostringstream os;
    if (!(std::isfinite(a) && a >= margins_.a0)) {
      os << "a(" << x << ")=" << a << " below margin " << margins_.a0;
      out.push_back(os.str());
      os.str({});
    }
    if (!(std::isfinite(r) && r >= margins_.r0)) {
      os << "r(" << x << ")=" << r << " below margin " << margins_.r0;
      out.push_back(os.str());
      os.str({});
    }
    if (!(std::isfinite(b) && b >= margins_.b_lo && b <= margins_.b_hi)) {
      os << "b(" << x << ")=" << b << " outside [" << margins_.b_lo << ","
         << margins_.b_hi << "]";
      out.push_back(os.str());
    }
    return out;
  }

  LevySpec spec_at(double x) const {
    const double a = a_fn_(x), b = b_fn_(x), r = r_fn_(x), m = m_fn_(x);
    require_domain(std::isfinite(a) && a >= margins_.a0 && std::isfinite(r) &&
                       r >= margins_.r0 && std::isfinite(b) && b >= margins_.b_lo &&
                       b <= margins_.b_hi && std::isfinite(m),
                   "meixner-like: parameter margins violated at x=" +
                       std::to_string(x));
    return LevySpec::meixner(a, b, r, m);
  }

 private:
  std::function<double(double)> a_fn_, b_fn_, r_fn_, m_fn_;
  MeixnerMargins margins_;
};

}  // namespace detail

inline FellerFamily make_meixner_like(std::function<double(double)> a_fn,
                                      std::function<double(double)> b_fn,
                                      std::function<double(double)> r_fn,
                                      std::function<double(double)> m_fn,
                                      MeixnerMargins margins = {}) {
  require(a_fn && b_fn && r_fn && m_fn, "make_meixner_like: missing parameter function");
  require(margins.a0 > 0.0 && margins.r0 > 0.0,
          "make_meixner_like: a0 and r0 margins must be positive");
  require(margins.b_lo > -3.14159265358979323846 &&
              margins.b_hi < 3.14159265358979323846 && margins.b_lo <= margins.b_hi,
          "make_meixner_like: b margins must satisfy -pi < b_lo <= b_hi < pi");
  for (double x : detail::construction_grid()) {
    const double a = a_fn(x), b = b_fn(x), r = r_fn(x), m = m_fn(x);
    if (!(std::isfinite(m) && std::isfinite(a) && a >= margins.a0 && std::isfinite(r) &&
          r >= margins.r0 && std::isfinite(b) && b >= margins.b_lo &&
          b <= margins.b_hi)) {
      std::ostringstream os;
      os << "make_meixner_like: margins violated at x=" << x << " (a=" << a
         << ",b=" << b << ",r=" << r << ",m=" << m << ")";
      throw std::invalid_argument(os.str());
    }
  }
  return FellerFamily(std::make_shared<detail::MeixnerLikeModel>(
      std::move(a_fn), std::move(b_fn), std::move(r_fn), std::move(m_fn), margins));
}

namespace detail {

class DriftFieldModel : public FamilyModel {
 public:
  explicit DriftFieldModel(std::function<double(double)> a_fn) : a_fn_(std::move(a_fn)) {}

  Complex exponent_at(double x, double xi) const override {
    return eval_exponent(LevySpec::deterministic_drift(a_fn_(x)), xi);
  }

  double sample_increment(double x, double h, RngStream&) const override {
    return a_fn_(x) * h;
  }

  Cumulants cumulants_at(double x, double h) const override {
    return {a_fn_(x) * h, 0.0};
  }

  std::string describe() const override { return "drift-field"; }

  std::string family_kind() const override { return "drift-field"; }

  std::vector<NamedFn> functions() const override {
    return {{"a", a_fn_, std::nullopt, std::nullopt}};
  }

 private:
  std::function<double(double)> a_fn_;
};

}  // namespace detail

// Deterministic family psi_x(xi) = -i a(x) xi. No construction-time checks:
// the validator flags growth and Lipschitz problems instead, so the
// non-existence demonstrations remain runnable.
inline FellerFamily make_drift_field(std::function<double(double)> a_fn) {
  require(static_cast<bool>(a_fn), "make_drift_field: missing drift function");
  return FellerFamily(std::make_shared<detail::DriftFieldModel>(std::move(a_fn)));
}

}  // namespace feller
