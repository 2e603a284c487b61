#pragma once

// Counter-based pseudo-random generator.
//
// Output i of a stream with 64-bit seed s is
//   out(s, i) = mix(s + (i + 1) * 0x9E3779B97F4A7C15)
// where mix is the splitmix64 finalizer:
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
// Doubles in [0,1) take the top 53 bits: (out >> 11) * 2^-53.
//
// The generator is stateless per index, so the whole stream is defined by
// the seed alone and is reproducible across platforms and implementations.

#include <cstdint>

namespace encircle {

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t rng_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return rng_mix(seed_ + (++counter_) * kRngGamma); }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Deterministic per-run seed for batch sweeps: element k of the stream
// seeded by mix(root).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t k) {
  return rng_mix(rng_mix(root) + (k + 1) * kRngGamma);
}

}  // namespace encircle
