#pragma once

#include <cstdint>
#include <random>

namespace ucs {

// All randomness in the project flows through this generator: mt19937_64
// seeded explicitly, with uniforms produced by an explicit 53-bit transform
// so streams are reproducible across standard libraries (std distributions
// are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Derives an independent stream, e.g. one per sample index.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    // SplitMix64 step decorrelates (seed, stream) pairs.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ucs
