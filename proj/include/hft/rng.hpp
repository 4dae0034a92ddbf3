#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace hft {

/// Seeded generator with platform-independent derived distributions.
///
/// std::mt19937_64 produces the same sequence everywhere, but the standard
/// distributions are implementation-defined, so uniform/normal draws are
/// derived here directly from the raw 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of randomness.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and up to two tags.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace hft
