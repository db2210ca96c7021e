#pragma once

#include <cstdint>
#include <random>

namespace ibprof {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent stream seed for (seed, stream, replicate).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t replicate) noexcept {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xD1B54A32D192ED03ULL);
  std::uint64_t b = splitmix64(s);
  s = b ^ (replicate * 0xAEF17502108EF2D9ULL);
  return splitmix64(s);
}

/**
 * std::mt19937_64 seeded with splitmix64(seed). The engine's output sequence
 * is fixed by the standard, and uniform() uses the top 53 bits, so draws are
 * identical on every conforming platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(first(seed)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t first(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
  }
  std::mt19937_64 engine_;
};

}  // namespace ibprof
