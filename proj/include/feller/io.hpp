#pragma once

#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "feller/config.hpp"
#include "feller/euler.hpp"
#include "feller/family.hpp"
#include "feller/stats.hpp"
#include "feller/validate.hpp"

namespace feller {

namespace detail {

// 17 significant digits: doubles survive a write/parse round trip.
inline std::string num17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

// Long format, one row per grid point per path.
inline void write_paths_csv(std::ostream& os, const std::vector<SamplePath>& paths) {
  os << "path_id,t,x\n";
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      os << p.path_index << ',' << detail::num17(p.times[k]) << ','
         << detail::num17(p.values[k]) << '\n';
    }
  }
}

// Same layout plus a per-state column (figure 2 colors paths by alpha(x)).
inline void write_paths_csv_with(std::ostream& os, const std::vector<SamplePath>& paths,
                                 const std::string& column,
                                 const std::function<double(double)>& fn) {
  os << "path_id,t,x," << column << '\n';
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      os << p.path_index << ',' << detail::num17(p.times[k]) << ','
         << detail::num17(p.values[k]) << ',' << detail::num17(fn(p.values[k])) << '\n';
    }
  }
}

inline void write_ensemble_stats_csv(std::ostream& os, const EnsembleStats& st) {
  os << "t,mean,variance,q01,q25,q50,q75,q99\n";
  for (std::size_t i = 0; i < st.eval_times.size(); ++i) {
    os << detail::num17(st.eval_times[i]) << ',' << detail::num17(st.mean[i]) << ',';
    if (st.variance[i]) os << detail::num17(*st.variance[i]);
    os << ',' << detail::num17(st.quantiles[i][0]) << ','
       << detail::num17(st.quantiles[i][1]) << ',' << detail::num17(st.quantiles[i][2])
       << ',' << detail::num17(st.quantiles[i][3]) << ','
       << detail::num17(st.quantiles[i][4]) << '\n';
  }
}

inline void write_ecf_csv(std::ostream& os, const EcfReport& r) {
  os << "xi,ecf_re,ecf_im,target_re,target_im,abs_error\n";
  for (std::size_t i = 0; i < r.xi_grid.size(); ++i) {
    os << detail::num17(r.xi_grid[i]) << ',' << detail::num17(r.ecf[i].real()) << ','
       << detail::num17(r.ecf[i].imag()) << ',' << detail::num17(r.target[i].real())
       << ',' << detail::num17(r.target[i].imag()) << ','
       << detail::num17(std::abs(r.ecf[i] - r.target[i])) << '\n';
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  write_file(path, manifest_to_json(m).dump(2) + "\n");
}

// The four bundled figures: preset, horizon, and step are fixed.
struct FigureDef {
  int id;
  const char* preset;
  double T;
  double h;
  double x0;
  bool alpha_column;  // figure 2 carries alpha(x) for color mapping
};

inline const std::vector<FigureDef>& figure_catalog() {
  static const std::vector<FigureDef> defs{
      {1, "paper-bpc", 20.0, 0.01, 0.0, false},
      {2, "paper-stable-like", 20.0, 0.1, 0.0, true},
      {3, "paper-nig-like", 1000.0, 0.1, 0.0, false},
      {4, "paper-meixner-like", 100.0, 0.1, 0.0, false},
  };
  return defs;
}

inline const FigureDef& figure_def(int id) {
  for (const auto& d : figure_catalog()) {
    if (d.id == id) return d;
  }
  throw std::invalid_argument("unknown figure id " + std::to_string(id) +
                              " (valid: 1, 2, 3, 4)");
}

// Renders the plot data for one figure into a CSV string. Deterministic in
// (id, seed, n_paths); thread count never changes the bytes.
inline std::string render_figure_csv(int id, std::uint64_t seed, int n_paths,
                                     int n_threads = 1) {
  const FigureDef& def = figure_def(id);
  FellerFamily family = make_preset(def.preset);
  SimConfig cfg;
  cfg.x0 = def.x0;
  cfg.T = def.T;
  cfg.h = def.h;
  cfg.seed = seed;
  cfg.n_paths = n_paths;
  const auto paths = simulate_ensemble(family, cfg, n_threads);
  std::ostringstream os;
  if (def.alpha_column) {
    const auto fns = family.model().functions();
    for (const auto& f : fns) {
      if (f.name == "alpha") {
        write_paths_csv_with(os, paths, "alpha", f.fn);
        return os.str();
      }
    }
    throw std::logic_error("figure definition expects an alpha function");
  }
  write_paths_csv(os, paths);
  return os.str();
}

}  // namespace feller
