#pragma once

// Deterministic random number generation. The standard distributions are
// implementation-defined, so every draw here is spelled out explicitly:
// identical seeds give identical streams on every platform.

#include <cstdint>
#include <random>

namespace forge {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double a, double b);

  // Standard normal via Box-Muller (pairs cached).
  double normal();
  double normal(double mean, double stddev);

  double exponential(double rate);

  // Inversion by sequential search; requires lambda <= 500 (guarded).
  long poisson(double lambda);

  // Uniform on {0, ..., n-1} by rejection (unbiased).
  std::uint64_t uniform_index(std::uint64_t n);

  // Independent child stream; deterministic in (parent seed, tag).
  Rng substream(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace forge
