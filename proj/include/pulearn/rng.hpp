#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pulearn {

/// Seeded stream on top of std::mt19937_64. Uniform and normal deviates are
/// derived from the raw 64-bit outputs directly, so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// +1 or -1 with equal probability.
  double sign() { return (next() >> 63) ? -1.0 : 1.0; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pulearn
