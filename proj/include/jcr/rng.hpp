// Seeded random streams. Streams are derived deterministically from a master
// seed and integer keys so that Monte-Carlo cells can run in any order (or
// concurrently) and still reproduce byte-identical results. The uniform and
// Gaussian transforms are implemented here rather than taken from
// <random> distributions so draws are stable across standard libraries.
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace jcr {

// SplitMix64, used to whiten seeds and derive child-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Child stream for cell (k1, k2, k3) of the owning stream's seed.
  static Rng child(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2 = 0,
                   std::uint64_t k3 = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (0x6a09e667f3bcc909ULL + k1));
    s = splitmix64(s ^ (0xbb67ae8584caa73bULL + k2));
    s = splitmix64(s ^ (0x3c6ef372fe94f82bULL + k3));
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_gaussian() {
    const double s = std::sqrt(0.5);
    return {s * gaussian(), s * gaussian()};
  }

  // Exponential with unit mean.
  double exponential() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace jcr
