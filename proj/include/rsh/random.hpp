#pragma once

#include <cstdint>
#include <random>

namespace rsh {

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the conversions to uniform, normal and
// bounded-integer draws are implemented here because the <random>
// distributions are implementation-defined.
//
// A stream has a single owner. Parallel work derives child seeds instead of
// sharing one stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal draw (Box-Muller, second value cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the index-th child stream of `seed`; used for per-bit training,
/// per-run benchmark seeds and anything else that must not depend on
/// iteration order.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace rsh
