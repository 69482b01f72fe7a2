#pragma once

#include <cstdint>
#include <random>

namespace oppnet {

/// Seeded random stream. Wraps mt19937_64 and derives the distributions
/// from raw 64-bit draws so sequences do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from (seed, stream).
  static Rng stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  bool bernoulli(double p) { return uniform01() < p; }
  /// Exponential with the given rate (events per unit).
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace oppnet
