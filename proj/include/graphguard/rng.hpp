#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace graphguard {

// Deterministic random source. Only the raw mt19937_64 stream is taken from
// the standard library; every derived distribution is computed here so that
// outputs are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  double exponential(double rate);
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Combines a base seed with stream coordinates (day, tx id, round, ...).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

}  // namespace graphguard
