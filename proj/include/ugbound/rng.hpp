#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>

namespace ugbound {

/// Seeded generator with a platform-independent output stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so every
/// derived quantity is computed here from raw 64-bit words:
///   - below(n): rejection sampling on the top bits (unbiased)
///   - uniform(): 53 high bits scaled by 2^-53, in [0, 1)
///   - normal(): Box-Muller on two uniform() draws, no cached spare
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Largest multiple of n that fits; values at or above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fisher-Yates, last position first.
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace ugbound
