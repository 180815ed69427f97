#pragma once

#include <cstdint>
#include <random>

namespace tvqs {

// Seeded random stream. Every stochastic operation takes one by reference so
// that results are a pure function of (inputs, stream state).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent sub-stream for (master seed, stream index).
  static Rng derive(std::uint64_t master, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // +1 or -1 with equal probability.
  int rademacher() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tvqs
