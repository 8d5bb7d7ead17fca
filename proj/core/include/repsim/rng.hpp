#ifndef REPSIM_RNG_HPP
#define REPSIM_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace repsim {

/// SplitMix64 (Steele, Lea, Flood 2014). Used to expand seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna 2018).
///
/// All derived draws (bounded integers, uniforms, normals, shuffles) are
/// implemented here rather than through <random> distributions, whose output
/// is implementation-defined, so results are identical across platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : Rng(seed, 0) {}

  /// Independent stream `stream` of the generator family keyed by `seed`.
  /// Streams are derived by hashing (seed, stream) through SplitMix64.
  Rng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next() noexcept;
  std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  /// Uniform integer in [0, bound); bound must be positive. Unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; consumes two draws per call.
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
};

/// In-place Fisher-Yates shuffle.
void shuffle(std::span<std::size_t> items, Rng& rng) noexcept;

/// Uniform random permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace repsim

#endif  // REPSIM_RNG_HPP
