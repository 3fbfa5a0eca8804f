#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "feller/family.hpp"
#include "feller/rng.hpp"
#include "feller/types.hpp"

namespace feller {

struct SimConfig {
  double x0 = 0.0;
  double T = 1.0;
  double h = 0.01;
  std::uint64_t seed = 0;
  int n_paths = 1;
};

namespace detail {

inline void check_sim_config(const SimConfig& cfg) {
  require(std::isfinite(cfg.x0), "SimConfig: x0 must be finite");
  require(cfg.h > 0.0 && std::isfinite(cfg.h), "SimConfig: h must be positive");
  require(cfg.T >= cfg.h && std::isfinite(cfg.T), "SimConfig: need 0 < h <= T");
  require(cfg.n_paths >= 1, "SimConfig: n_paths must be at least 1");
}

}  // namespace detail

// Number of steps n = floor(T/h); the final grid time n*h is the unique
// uniform-grid point in (T-h, T]. The small slack absorbs cases like
// T/h = 1000/0.1 where the quotient rounds just below an integer.
inline int step_count(double T, double h) {
  return static_cast<int>(std::floor(T / h + 1e-9));
}

// One path of the approximating chain, on the grid 0, h, ..., n*h. If the
// state overflowed, the path is truncated at the last finite state and
// `overflowed` is set.
struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  std::string family_id;
  SimConfig config;
  int path_index = 0;
  bool overflowed = false;
};

// Chain steps: x_k = x_{k-1} + z_k with z_k drawn from the increment law of
// the family at the current state. The path's stream is the sub-stream of
// config.seed with id path_index, so paths are independent and any path can
// be regenerated in isolation.
inline SamplePath simulate_path(const FellerFamily& family, const SimConfig& config,
                                int path_index = 0) {
  detail::check_sim_config(config);
  require(path_index >= 0, "simulate_path: path_index must be nonnegative");

  const int n = step_count(config.T, config.h);
  RngStream stream = RngStream(config.seed).substream(static_cast<std::uint64_t>(path_index));

  SamplePath path;
  path.family_id = family.id();
  path.config = config;
  path.path_index = path_index;
  path.times.reserve(static_cast<std::size_t>(n) + 1);
  path.values.reserve(static_cast<std::size_t>(n) + 1);
  path.times.push_back(0.0);
  path.values.push_back(config.x0);

  double x = config.x0;
  for (int k = 1; k <= n; ++k) {
    const double z = family.sample_increment(x, config.h, stream);
    const double next = x + z;
    if (!std::isfinite(next) || std::abs(next) > 1e300) {
      path.overflowed = true;
      break;
    }
    x = next;
    path.times.push_back(static_cast<double>(k) * config.h);
    path.values.push_back(x);
  }
  return path;
}

// n_paths independent paths from sub-streams 0..n_paths-1. The result is a
// deterministic function of (family, config): each worker writes only its
// own slots, so it is identical for every n_threads value.
inline std::vector<SamplePath> simulate_ensemble(const FellerFamily& family,
                                                 const SimConfig& config,
                                                 unsigned n_threads = 1) {
  detail::check_sim_config(config);
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      std::min<unsigned>(n_threads, static_cast<unsigned>(config.n_paths));

  std::vector<SamplePath> paths(static_cast<std::size_t>(config.n_paths));
  if (workers <= 1) {
    for (int i = 0; i < config.n_paths; ++i) {
      paths[static_cast<std::size_t>(i)] = simulate_path(family, config, i);
    }
    return paths;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = static_cast<int>(w); i < config.n_paths;
           i += static_cast<int>(workers)) {
        paths[static_cast<std::size_t>(i)] = simulate_path(family, config, i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return paths;
}

}  // namespace feller
