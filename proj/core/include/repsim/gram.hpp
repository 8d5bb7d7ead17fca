#ifndef REPSIM_GRAM_HPP
#define REPSIM_GRAM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "repsim/matrix.hpp"

namespace repsim {

enum class GramVariant {
  kRaw,            ///< K = X X^T
  kCentered,       ///< K' = H K H
  kDiagonalZeroed, ///< K with its diagonal set to zero
};

/// Dense n x n symmetric matrix of example-pair inner products.
class GramMatrix {
 public:
  GramMatrix(std::size_t n, std::vector<double> values, GramVariant variant);

  std::size_t n() const noexcept { return n_; }
  GramVariant variant() const noexcept { return variant_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * n_ + j];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
  GramVariant variant_;
};

/// Linear-kernel Gram matrix of the rows of `x`.
GramMatrix gram(const Matrix& x);

/// Double centering H K H with H = I - 11^T/n, n the Gram dimension.
/// Requires a raw Gram matrix.
GramMatrix center(const GramMatrix& g);

/// Copy of a raw Gram matrix with its diagonal zeroed.
GramMatrix zeroDiagonal(const GramMatrix& g);

/// Biased HSIC: vec(K') . vec(L') / (m-1)^2. Requires raw inputs, m >= 2.
double hsic0(const GramMatrix& k, const GramMatrix& l);

/// Same as hsic0 for inputs that are already centered.
double hsic0Centered(const GramMatrix& kc, const GramMatrix& lc);

/// Unbiased HSIC U-statistic on raw Gram matrices of size n >= 4:
///
///   1/(n(n-3)) * [ tr(K~L~) + (1^T K~ 1)(1^T L~ 1)/((n-1)(n-2))
///                  - 2/(n-2) * 1^T K~ L~ 1 ]
///
/// where K~, L~ are K, L with zeroed diagonals. The zeroed copies are never
/// materialized; the trace is an elementwise product-sum over i != j and
/// 1^T K~ L~ 1 is the dot product of the two off-diagonal row-sum vectors.
double hsic1(const GramMatrix& k, const GramMatrix& l);

}  // namespace repsim

#endif  // REPSIM_GRAM_HPP
