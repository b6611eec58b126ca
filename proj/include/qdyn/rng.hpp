#pragma once

#include <cstdint>

namespace qdyn {

// Counter-based splittable generator (SplitMix64). Output is a pure
// function of (seed, call index), so streams are reproducible bit-for-bit
// across platforms.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool coin() { return (next() >> 63) != 0; }

  // split off an independent stream
  SplitMix64 split() { return SplitMix64(next()); }

  static constexpr const char* name() { return "splitmix64"; }

private:
  std::uint64_t state_;
};

}  // namespace qdyn
