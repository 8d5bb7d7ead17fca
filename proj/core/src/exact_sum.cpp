#include "repsim/exact_sum.hpp"

#include <cmath>
#include <cstring>

#include "repsim/error.hpp"

namespace repsim {

namespace {

// Bit 0 of limb 0 has weight 2^-1074, the smallest subnormal.
constexpr int kUnitExponent = -1074;

}  // namespace

void ExactSum::add(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgumentError("ExactSum: non-finite term");
  }
  if (value == 0.0) return;

  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  const bool negative = (bits >> 63) != 0;
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  std::uint64_t mantissa = bits & ((std::uint64_t{1} << 52) - 1);
  int offset = 0;  // bit position of the mantissa's least significant bit
  if (biased == 0) {
    offset = 0;  // subnormal: mantissa * 2^-1074
  } else {
    mantissa |= std::uint64_t{1} << 52;
    offset = biased - 1075 - kUnitExponent;
  }

  const int limb = offset / 64;
  const int shift = offset % 64;
  const std::uint64_t lo = mantissa << shift;
  const std::uint64_t hi = shift == 0 ? 0 : mantissa >> (64 - shift);

  if (!negative) {
    std::uint64_t carry = 0;
    std::uint64_t parts[2] = {lo, hi};
    for (int i = limb; i < kLimbs; ++i) {
      const std::uint64_t addend = (i - limb < 2) ? parts[i - limb] : 0;
      const std::uint64_t s1 = limbs_[i] + addend;
      const std::uint64_t c1 = s1 < addend ? 1 : 0;
      const std::uint64_t s2 = s1 + carry;
      const std::uint64_t c2 = s2 < carry ? 1 : 0;
      limbs_[i] = s2;
      carry = c1 | c2;
      if (i - limb >= 1 && carry == 0) break;
    }
  } else {
    std::uint64_t borrow = 0;
    std::uint64_t parts[2] = {lo, hi};
    for (int i = limb; i < kLimbs; ++i) {
      const std::uint64_t sub = (i - limb < 2) ? parts[i - limb] : 0;
      const std::uint64_t d1 = limbs_[i] - sub;
      const std::uint64_t b1 = limbs_[i] < sub ? 1 : 0;
      const std::uint64_t d2 = d1 - borrow;
      const std::uint64_t b2 = d1 < borrow ? 1 : 0;
      limbs_[i] = d2;
      borrow = b1 | b2;
      if (i - limb >= 1 && borrow == 0) break;
    }
  }
}

void ExactSum::merge(const ExactSum& other) noexcept {
  std::uint64_t carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const std::uint64_t s1 = limbs_[i] + other.limbs_[i];
    const std::uint64_t c1 = s1 < other.limbs_[i] ? 1 : 0;
    const std::uint64_t s2 = s1 + carry;
    const std::uint64_t c2 = s2 < carry ? 1 : 0;
    limbs_[i] = s2;
    carry = c1 | c2;
  }
}

bool ExactSum::isZero() const noexcept {
  for (auto l : limbs_)
    if (l != 0) return false;
  return true;
}

double ExactSum::value() const noexcept {
  auto mag = limbs_;
  const bool negative = (mag[kLimbs - 1] >> 63) != 0;
  if (negative) {
    // Two's-complement negation.
    std::uint64_t carry = 1;
    for (auto& l : mag) {
      l = ~l + carry;
      carry = (carry != 0 && l == 0) ? 1 : 0;
    }
  }
  int top = kLimbs - 1;
  while (top >= 0 && mag[top] == 0) --top;
  if (top < 0) return 0.0;

  // Three limbs give 129+ significant bits, far more than a double holds.
  // Summing the smaller contributions first keeps the error within an ulp.
  double result = 0.0;
  for (int i = std::max(0, top - 2); i <= top; ++i) {
    result += std::ldexp(static_cast<double>(mag[i]), 64 * i + kUnitExponent);
  }
  return negative ? -result : result;
}

}  // namespace repsim
