#pragma once
// Counter-based pseudo-randomness. Every stream is a pure function of a
// 64-bit seed, so concurrent use and re-runs cannot change results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pairrank {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent child seed from (master, index, stream).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t stream = 0) {
  return mix64(master + kGoldenGamma * (index + 1) +
               0xD1B54A32D192ED03ULL * (stream + 1));
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_ += kGoldenGamma); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n) without modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  bool coin() { return (next() & 1) != 0; }

  // Standard normal via Box-Muller. One draw per call; the library rolls
  // its own so streams are identical across standard libraries.
  double gaussian() {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace pairrank
