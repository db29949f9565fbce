#pragma once
// Seeded random streams. Substreams are derived from a master seed via
// splitmix64 so per-sensor generation is order-independent; all draws go
// through hand-rolled uniform/normal conversions to keep byte-identical
// output across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace shapesense {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t st = a ^ (b * 0x9e3779b97f4a7c15ULL + 0x517cc1b727220a95ULL);
  return splitmix64(st);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_mix(seed_mix(a, b), c);
}

// Stream tags keep independent parts of a run on independent substreams.
namespace stream_tag {
inline constexpr std::uint64_t kDeploy = 0x11;
inline constexpr std::uint64_t kLoss = 0x22;
inline constexpr std::uint64_t kSdNoise = 0x33;
inline constexpr std::uint64_t kAdopt = 0x44;
inline constexpr std::uint64_t kRun = 0x55;
}  // namespace stream_tag

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; uses two draws per variate for stream reproducibility.
  double normal() {
    const double u1 = static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace shapesense
