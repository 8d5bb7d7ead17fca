#ifndef REPSIM_EXACT_SUM_HPP
#define REPSIM_EXACT_SUM_HPP

#include <array>
#include <cstdint>

namespace repsim {

/// Error-free accumulator for finite doubles.
///
/// Every finite double is an integer multiple of 2^-1074, so the running sum
/// is held as a fixed-width two's-complement integer in that unit. Addition
/// is therefore exact, associative and commutative: any grouping of the same
/// terms, including merges of partial accumulators, ends in the same state
/// and reads back the same double. Headroom covers more than 2^60 terms of
/// maximal magnitude.
class ExactSum {
 public:
  ExactSum() = default;

  /// Throws InvalidArgumentError for NaN or infinity.
  void add(double value);
  void merge(const ExactSum& other) noexcept;

  /// Nearest double to the exact sum (within one ulp).
  double value() const noexcept;
  bool isZero() const noexcept;

  friend bool operator==(const ExactSum&, const ExactSum&) = default;

 private:
  static constexpr int kLimbs = 35;
  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace repsim

#endif  // REPSIM_EXACT_SUM_HPP
