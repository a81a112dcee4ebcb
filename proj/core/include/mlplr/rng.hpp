#pragma once

#include <cstdint>
#include <random>

namespace mlplr {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` of a run seeded with `seed`. Counter-based, so the
/// stream for (seed, i) never depends on how many other streams were drawn.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Portable generator: mt19937_64 plus hand-rolled uniform/normal transforms so
/// that draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Marsaglia polar method).
  double normal() noexcept;
  double exponential() noexcept;

  std::uint64_t next_u64() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mlplr
