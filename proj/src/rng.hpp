#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace coltree {

// Stream derivation: stream_id = mix64(seed, trial_index) via two splitmix64
// steps, so per-trial streams are decorrelated and independent of scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ trial;
  return splitmix64(s);
}

// mt19937_64 engine with hand-rolled variate transforms. The standard
// distributions are implementation-defined, so every transform here is
// explicit to keep (seed, trial) -> output stable.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_id) : eng_(stream_id) {}
  Rng(std::uint64_t seed, std::uint64_t trial) : eng_(mix64(seed, trial)) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n); multiply-high map (bias < n/2^64, negligible
  // for simulation use and branch-free, hence reproducible).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  // Standard normal via Box-Muller; always consumes exactly two uniforms.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace coltree
