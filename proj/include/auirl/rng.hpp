#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace auirl {

/**
 * Seeded generator for simulation runs. Draws are derived directly from the
 * mt19937_64 output stream (not std distributions), so a seed reproduces the
 * same sequence with any standard library.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /** Uniform integer in [0, n); n must be positive. */
  std::uint64_t index(std::uint64_t n) {
    // Rejection on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /** Uniform real in [0, 1) with 53 bits of resolution. */
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

}  // namespace auirl
