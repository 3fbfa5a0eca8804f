#pragma once

#include <cmath>
#include <cstdint>

namespace feller {

namespace detail {

// SplitMix64 finalizer; used to turn keys into well-mixed seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic random stream (PCG-XSH-RR, 64-bit state, 32-bit output).
//
// Every stream carries a 64-bit derivation key. substream(id) is a pure
// function of (key, id): it mixes the id into the key and reseeds, so the
// child is independent of how far the parent has been consumed. Distinct
// ids select distinct PCG stream increments, which gives pairwise
// independent sequences by construction of the generator. Deriving the
// same id twice yields the identical stream; callers who need several
// independent children must use distinct ids.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(detail::splitmix64(seed)) {
    reseed();
  }

  // Child stream identified by (this stream's key, id). Does not consume
  // randomness from the parent.
  RngStream substream(std::uint64_t id) const {
    return RngStream(detail::splitmix64(key_ ^ (0x9E3779B97F4A7C15ULL * (id + 1))),
                     FromKey{});
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached and returned on the next call.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exp(1)
  double exponential() { return -std::log(uniform()); }

  std::uint64_t key() const { return key_; }

 private:
  struct FromKey {};
  RngStream(std::uint64_t key, FromKey) : key_(key) { reseed(); }

  void reseed() {
    inc_ = (detail::splitmix64(key_ ^ 0xDA3E39CB94B95BDBULL) << 1u) | 1u;
    state_ = 0;
    next_u32();
    state_ += detail::splitmix64(key_ ^ 0x8BB84B93962EACC9ULL);
    next_u32();
  }

  std::uint64_t key_;
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace feller
