#pragma once

#include <cstdint>

namespace lpball {

// SplitMix64 (Steele, Lea, Flood 2014). State advances by the 64-bit golden
// ratio constant; each output is a bijective scramble of the new state, so
// the generator is portable across platforms given identical seeds.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1): 53 random mantissa bits shifted
  // into [0, 1), offset by half an ulp so 0 is never returned.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // Standard normal via the inverse CDF applied to next_uniform().
  double next_normal();
};

// Output scramble of SplitMix64 in isolation, used to derive stream seeds.
std::uint64_t mix64(std::uint64_t z);

// Independent substream for a (seed, index) pair: state = mix64(mix64(seed) + index).
// Double scrambling keeps substreams from overlapping the root sequence.
SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

// Inverse of the standard normal CDF, Wichura's PPND16 (AS 241).
// Accurate to about 1e-15 for u in (0, 1); domain error outside.
double inverse_normal_cdf(double u);

}  // namespace lpball
