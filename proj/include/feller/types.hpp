#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace feller {

using Complex = std::complex<double>;

// Per-increment mean/variance. Heavy-tailed laws report nullopt instead of
// a meaningless Monte Carlo average.
struct Cumulants {
  std::optional<double> mean;
  std::optional<double> variance;
};

// Closed interval on the extended real line.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }

  double distance_to(double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }
};

inline double interval_gap(const Interval& a, const Interval& b) {
  if (a.lo > b.hi) return a.lo - b.hi;
  if (b.lo > a.hi) return b.lo - a.hi;
  return 0.0;  // overlapping
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_domain(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace feller
