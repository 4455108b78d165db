#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace polisim {

/// Seeded random source with platform-independent output.
///
/// std::mt19937_64 is fully specified by the standard, but the std::*_distribution
/// adaptors are not, so every conversion from raw bits to a sample lives here.
/// Identical seeds therefore produce identical draws with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn proportionally to non-negative weights; weights must not all be zero.
  std::size_t weighted(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; maps (base, stream) to a well-mixed child seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a 64-bit hash; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Maps a hash to [0, 1).
inline double hash_to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace polisim
