#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "feller/family.hpp"
#include "feller/levy.hpp"
#include "feller/presets.hpp"
#include "feller/types.hpp"

namespace feller {

inline constexpr const char kToolVersion[] = "0.1.0";

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void config_error(const std::string& ctx, const std::string& msg) {
  throw std::invalid_argument("config: " + ctx + ": " + msg);
}

// Unknown keys are errors: a misspelled field must not be silently ignored.
inline void check_keys(const Json& obj, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(ctx, "expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) { ok = true; break; }
    }
    if (!ok) config_error(ctx, "unknown key '" + item.key() + "'");
  }
}

inline double get_number(const Json& obj, const std::string& ctx, const char* key) {
  if (!obj.contains(key)) config_error(ctx, std::string("missing key '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(ctx, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

inline double get_number_or(const Json& obj, const std::string& ctx, const char* key,
                            double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(ctx, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

// Piecewise-linear interpolation through sorted breakpoints, constant
// outside the covered range.
struct PiecewiseLinear {
  std::vector<double> xs, ys;
  double operator()(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
  }
  double max_slope() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      s = std::max(s, std::abs(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
    }
    return s;
  }
  double max_abs_value() const {
    double m = 0.0;
    for (double y : ys) m = std::max(m, std::abs(y));
    return m;
  }
};

// Function specification: constant or piecewise-linear breakpoint list.
inline std::function<double(double)> parse_fn(const Json& spec, const std::string& ctx,
                                              double* lipschitz = nullptr,
                                              double* bound = nullptr) {
  if (!spec.is_object()) config_error(ctx, "expected a function object");
  if (!spec.contains("type") || !spec.at("type").is_string()) {
    config_error(ctx, "missing string key 'type'");
  }
  const std::string type = spec.at("type").get<std::string>();
  if (type == "constant") {
    check_keys(spec, ctx, {"type", "value"});
    const double v = get_number(spec, ctx, "value");
    if (!std::isfinite(v)) config_error(ctx, "constant value must be finite");
    if (lipschitz) *lipschitz = 0.0;
    if (bound) *bound = std::abs(v);
    return [v](double) { return v; };
  }
  if (type == "piecewise_linear") {
    check_keys(spec, ctx, {"type", "points"});
    if (!spec.contains("points") || !spec.at("points").is_array() ||
        spec.at("points").empty()) {
      config_error(ctx, "piecewise_linear needs a nonempty 'points' array");
    }
    PiecewiseLinear pl;
    for (const auto& p : spec.at("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        config_error(ctx, "each point must be a [x, y] number pair");
      }
      pl.xs.push_back(p[0].get<double>());
      pl.ys.push_back(p[1].get<double>());
      if (!std::isfinite(pl.xs.back()) || !std::isfinite(pl.ys.back())) {
        config_error(ctx, "breakpoints must be finite");
      }
    }
    for (std::size_t i = 0; i + 1 < pl.xs.size(); ++i) {
      if (!(pl.xs[i] < pl.xs[i + 1])) {
        config_error(ctx, "breakpoint x values must be strictly increasing");
      }
    }
    if (lipschitz) *lipschitz = pl.max_slope();
    if (bound) *bound = pl.max_abs_value();
    return pl;
  }
  config_error(ctx, "unknown function type '" + type + "'");
}

// Weight specification: a function spec or a distance bump over an interval
// set. Interval endpoints use null for an infinite end.
inline WeightFunction parse_weight(const Json& spec, const std::string& ctx) {
  if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string()) {
    config_error(ctx, "expected a weight object with a string 'type'");
  }
  WeightFunction w;
  const std::string type = spec.at("type").get<std::string>();
  if (type == "bump") {
    check_keys(spec, ctx, {"type", "region", "epsilon"});
    const double eps = get_number(spec, ctx, "epsilon");
    if (!(eps > 0.0) || !std::isfinite(eps)) config_error(ctx, "epsilon must be positive");
    if (!spec.contains("region") || !spec.at("region").is_array() ||
        spec.at("region").empty()) {
      config_error(ctx, "bump needs a nonempty 'region' array of [lo, hi] pairs");
    }
    std::vector<Interval> parts;
    for (const auto& p : spec.at("region")) {
      if (!p.is_array() || p.size() != 2) config_error(ctx, "region entries are [lo, hi]");
      Interval iv;
      if (p[0].is_null()) iv.lo = -std::numeric_limits<double>::infinity();
      else if (p[0].is_number()) iv.lo = p[0].get<double>();
      else config_error(ctx, "interval ends are numbers or null");
      if (p[1].is_null()) iv.hi = std::numeric_limits<double>::infinity();
      else if (p[1].is_number()) iv.hi = p[1].get<double>();
      else config_error(ctx, "interval ends are numbers or null");
      if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
        config_error(ctx, "interval lo must not exceed hi");
      }
      parts.push_back(iv);
    }
    w.eval = [parts, eps](double x) {
      const double d = region_distance(parts, x);
      return std::min(1.0, std::max(0.0, 1.0 - d / eps));
    };
    w.declared_lipschitz = 1.0 / eps;
    w.declared_bound = 1.0;
    w.description = "bump:" + region_to_string(parts);
    return w;
  }
  double lip = 0.0, bound = 0.0;
  w.eval = parse_fn(spec, ctx, &lip, &bound);
  w.declared_lipschitz = lip;
  w.declared_bound = bound;
  w.description = type;
  return w;
}

inline LevySpec parse_process(const Json& comp, const std::string& ctx) {
  if (!comp.contains("process") || !comp.at("process").is_string()) {
    config_error(ctx, "missing string key 'process'");
  }
  const std::string name = comp.at("process").get<std::string>();
  const Json params = comp.contains("params") ? comp.at("params") : Json::object();
  const std::string pctx = ctx + ".params";

  auto direction = [&]() {
    if (!params.contains("direction")) return JumpDirection::up;
    const auto& d = params.at("direction");
    if (d.is_string() && d.get<std::string>() == "up") return JumpDirection::up;
    if (d.is_string() && d.get<std::string>() == "down") return JumpDirection::down;
    config_error(pctx, "direction must be \"up\" or \"down\"");
  };

  try {
    if (name == "brownian") {
      check_keys(params, pctx, {});
      return LevySpec::brownian();
    }
    if (name == "poisson") {
      check_keys(params, pctx, {"direction"});
      return LevySpec::poisson(direction());
    }
    if (name == "cauchy") {
      check_keys(params, pctx, {});
      return LevySpec::cauchy();
    }
    if (name == "symmetric_stable") {
      check_keys(params, pctx, {"alpha"});
      return LevySpec::symmetric_stable(get_number(params, pctx, "alpha"));
    }
    if (name == "gamma") {
      check_keys(params, pctx, {"direction"});
      return LevySpec::gamma_process(direction());
    }
    if (name == "nig") {
      check_keys(params, pctx, {"alpha", "beta", "delta", "mu"});
      return LevySpec::nig(get_number(params, pctx, "alpha"),
                           get_number(params, pctx, "beta"),
                           get_number(params, pctx, "delta"),
                           get_number(params, pctx, "mu"));
    }
    if (name == "meixner") {
      check_keys(params, pctx, {"a", "b", "r", "m"});
      return LevySpec::meixner(get_number(params, pctx, "a"),
                               get_number(params, pctx, "b"),
                               get_number(params, pctx, "r"),
                               get_number(params, pctx, "m"));
    }
    if (name == "deterministic_drift") {
      check_keys(params, pctx, {"c"});
      return LevySpec::deterministic_drift(get_number(params, pctx, "c"));
    }
  } catch (const std::invalid_argument& e) {
    if (std::string_view(e.what()).substr(0, 7) == "config:") throw;
    config_error(pctx, e.what());
  }
  config_error(ctx, "unknown process '" + name + "'");
}

}  // namespace detail

// Strictly validated, normalized family configuration. `doc` retains the
// parsed JSON (canonical key order) so serialization round-trips exactly.
struct FamilyConfig {
  Json doc;
};

struct SimDefaults {
  std::optional<double> x0, T, h;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
};

inline FellerFamily build_family(const FamilyConfig& cfg) {
  const Json& fam = cfg.doc.at("family");
  const std::string ctx = "family";
  if (fam.contains("preset")) {
    return make_preset(fam.at("preset").get<std::string>());
  }
  const std::string type = fam.at("type").get<std::string>();
  if (type == "mixture") {
    std::vector<LevySpec> specs;
    std::vector<WeightFunction> weights;
    std::size_t i = 0;
    for (const auto& comp : fam.at("components")) {
      const std::string cctx = ctx + ".components[" + std::to_string(i) + "]";
      specs.push_back(detail::parse_process(comp, cctx));
      weights.push_back(detail::parse_weight(comp.at("weight"), cctx + ".weight"));
      ++i;
    }
    return make_mixture(std::move(specs), std::move(weights));
  }
  const std::string kind = fam.at("kind").get<std::string>();
  if (kind == "stable_like") {
    return make_stable_like(detail::parse_fn(fam.at("alpha"), ctx + ".alpha"),
                            fam.at("alpha_lo").get<double>(),
                            fam.at("alpha_hi").get<double>());
  }
  if (kind == "nig_like") {
    return make_nig_like(detail::parse_fn(fam.at("alpha"), ctx + ".alpha"),
                         detail::parse_fn(fam.at("beta"), ctx + ".beta"),
                         detail::parse_fn(fam.at("delta"), ctx + ".delta"),
                         detail::parse_fn(fam.at("mu"), ctx + ".mu"),
                         detail::get_number_or(fam, ctx, "margin", 1e-3));
  }
  if (kind == "meixner_like") {
    MeixnerMargins margins;
    if (fam.contains("margins")) {
      const auto& m = fam.at("margins");
      margins.a0 = detail::get_number_or(m, ctx + ".margins", "a0", margins.a0);
      margins.r0 = detail::get_number_or(m, ctx + ".margins", "r0", margins.r0);
      margins.b_lo = detail::get_number_or(m, ctx + ".margins", "b_lo", margins.b_lo);
      margins.b_hi = detail::get_number_or(m, ctx + ".margins", "b_hi", margins.b_hi);
    }
    return make_meixner_like(detail::parse_fn(fam.at("a"), ctx + ".a"),
                             detail::parse_fn(fam.at("b"), ctx + ".b"),
                             detail::parse_fn(fam.at("r"), ctx + ".r"),
                             detail::parse_fn(fam.at("m"), ctx + ".m"), margins);
  }
  // drift_field; parse_config has already vetted the kind
  return make_drift_field(detail::parse_fn(fam.at("a"), ctx + ".a"));
}

// Parses and validates a configuration document. Validation includes one
// trial family construction, so range and margin errors surface here.
inline FamilyConfig parse_config(const Json& doc) {
  detail::check_keys(doc, "top level", {"family", "sim"});
  if (!doc.contains("family")) detail::config_error("top level", "missing 'family'");
  const Json& fam = doc.at("family");
  if (!fam.is_object()) detail::config_error("family", "expected an object");

  if (fam.contains("preset")) {
    detail::check_keys(fam, "family", {"preset"});
    if (!fam.at("preset").is_string()) {
      detail::config_error("family.preset", "expected a string");
    }
  } else {
    if (!fam.contains("type") || !fam.at("type").is_string()) {
      detail::config_error("family", "missing string key 'type' (or 'preset')");
    }
    const std::string type = fam.at("type").get<std::string>();
    if (type == "mixture") {
      detail::check_keys(fam, "family", {"type", "components"});
      if (!fam.contains("components") || !fam.at("components").is_array() ||
          fam.at("components").empty()) {
        detail::config_error("family", "mixture needs a nonempty 'components' array");
      }
      std::size_t i = 0;
      for (const auto& comp : fam.at("components")) {
        const std::string cctx = "family.components[" + std::to_string(i) + "]";
        detail::check_keys(comp, cctx, {"process", "params", "weight"});
        if (!comp.contains("weight")) detail::config_error(cctx, "missing 'weight'");
        ++i;
      }
    } else if (type == "parametric") {
      if (!fam.contains("kind") || !fam.at("kind").is_string()) {
        detail::config_error("family", "parametric needs a string 'kind'");
      }
      const std::string kind = fam.at("kind").get<std::string>();
      if (kind == "stable_like") {
        detail::check_keys(fam, "family", {"type", "kind", "alpha", "alpha_lo", "alpha_hi"});
        for (const char* k : {"alpha", "alpha_lo", "alpha_hi"}) {
          if (!fam.contains(k)) {
            detail::config_error("family", std::string("missing '") + k + "'");
          }
        }
      } else if (kind == "nig_like") {
        detail::check_keys(fam, "family",
                           {"type", "kind", "alpha", "beta", "delta", "mu", "margin"});
        for (const char* k : {"alpha", "beta", "delta", "mu"}) {
          if (!fam.contains(k)) {
            detail::config_error("family", std::string("missing '") + k + "'");
          }
        }
      } else if (kind == "meixner_like") {
        detail::check_keys(fam, "family", {"type", "kind", "a", "b", "r", "m", "margins"});
        for (const char* k : {"a", "b", "r", "m"}) {
          if (!fam.contains(k)) {
            detail::config_error("family", std::string("missing '") + k + "'");
          }
        }
        if (fam.contains("margins")) {
          detail::check_keys(fam.at("margins"), "family.margins",
                             {"a0", "r0", "b_lo", "b_hi"});
        }
      } else if (kind == "drift_field") {
        detail::check_keys(fam, "family", {"type", "kind", "a"});
        if (!fam.contains("a")) detail::config_error("family", "missing 'a'");
      } else {
        detail::config_error("family", "unknown parametric kind '" + kind + "'");
      }
    } else {
      detail::config_error("family", "unknown type '" + type + "'");
    }
  }

  if (doc.contains("sim")) {
    detail::check_keys(doc.at("sim"), "sim", {"x0", "T", "h", "seed", "paths"});
  }

  FamilyConfig cfg{doc};
  build_family(cfg);  // surfaces range/margin errors at parse time
  return cfg;
}

inline FamilyConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(doc);
}

inline FamilyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

inline SimDefaults sim_defaults(const FamilyConfig& cfg) {
  SimDefaults out;
  if (!cfg.doc.contains("sim")) return out;
  const Json& sim = cfg.doc.at("sim");
  if (sim.contains("x0")) out.x0 = sim.at("x0").get<double>();
  if (sim.contains("T")) out.T = sim.at("T").get<double>();
  if (sim.contains("h")) out.h = sim.at("h").get<double>();
  if (sim.contains("seed")) out.seed = sim.at("seed").get<std::uint64_t>();
  if (sim.contains("paths")) out.paths = sim.at("paths").get<int>();
  return out;
}

inline std::string serialize_config(const FamilyConfig& cfg) { return cfg.doc.dump(2); }

inline std::uint64_t fnv1a_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash_hex(const FamilyConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(cfg.doc.dump())));
  return buf;
}

// Emitted beside every output; records everything needed to reproduce the
// run bit-exactly.
struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  double h = 0.0, T = 0.0, x0 = 0.0;
  int n_paths = 0;
  std::string tool_version = kToolVersion;
  std::string family_id;
  std::string validation_summary;
};

inline Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["h"] = m.h;
  j["T"] = m.T;
  j["x0"] = m.x0;
  j["n_paths"] = m.n_paths;
  j["tool_version"] = m.tool_version;
  j["family_id"] = m.family_id;
  j["validation_summary"] = m.validation_summary;
  return j;
}

}  // namespace feller
