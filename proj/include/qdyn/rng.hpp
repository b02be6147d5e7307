#pragma once

#include <cstdint>

namespace qdyn {

// Counter-based generator: the value at (seed, index, stream) never depends on
// call order, so parallel consumers reproduce the sequential results exactly.
struct CounterRng {
  std::uint64_t seed = 0;

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t bits(std::uint64_t index, std::uint64_t stream = 0) const {
    return mix(mix(seed ^ 0x6a09e667f3bcc908ULL) + mix(index) + 0x9e3779b97f4a7c15ULL * stream);
  }

  // uniform in [0, 1)
  double uniform(std::uint64_t index, std::uint64_t stream = 0) const {
    return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi, std::uint64_t index, std::uint64_t stream = 0) const {
    return lo + (hi - lo) * uniform(index, stream);
  }
};

}  // namespace qdyn
