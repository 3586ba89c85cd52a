#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace phimi {

/// SplitMix64 finalizer; used to scramble stream keys before seeding.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replicate stream `index` under master seed `seed`: the key
/// seed ^ index, scrambled with SplitMix64.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seed for a named purpose (pilot sample, bootstrap, grid cell, ...), so that
/// independent parts of one run never share a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t index = 0) noexcept;

/// Reproducible random source. Every variate is produced by an algorithm
/// fixed here (not by <random> distributions, whose output is
/// implementation-defined), so a seed gives identical draws on every
/// platform:
///   uniform  -- top 53 bits of mt19937_64, mapped to (k + 0.5) / 2^53
///   normal   -- Box-Muller on two uniforms, second variate cached
///   index(n) -- rejection sampling on 64-bit words
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(stream_seed(seed, index));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace phimi
