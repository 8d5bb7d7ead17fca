#ifndef REPSIM_MATRIX_HPP
#define REPSIM_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace repsim {

/// Dense row-major matrix of doubles.
///
/// A Matrix always has at least one row and one column. Constructors that
/// take external data reject non-finite values; element writers are the
/// caller's responsibility.
class Matrix {
 public:
  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::size_t rows, std::size_t cols, std::span<const float> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Thin singular value decomposition A = U diag(s) V^T with r = min(m, p).
///
/// Singular values are nonincreasing. Each left singular vector is signed so
/// that its largest-magnitude entry is positive (the matching right vector is
/// flipped with it), which makes downstream cosine maps reproducible.
struct SvdResult {
  Matrix leftVectors;               ///< m x r, orthonormal columns
  std::vector<double> singularValues;
  Matrix rightVectors;              ///< p x r, orthonormal columns
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Subtracts each column's mean. Idempotent up to rounding.
Matrix centerColumns(const Matrix& a);

double frobeniusNorm(const Matrix& a);

/// Throws ConvergenceError if the decomposition does not converge and
/// DimensionError / InvalidArgumentError on non-finite input.
SvdResult svd(const Matrix& a);

/// Rows of `a` at `indices`, in the given order.
Matrix gatherRows(const Matrix& a, std::span<const std::size_t> indices);

/// Horizontal concatenation; all parts must share the row count.
Matrix concatColumns(std::span<const Matrix> parts);

/// Column `c` of `a` copied into a vector.
std::vector<double> column(const Matrix& a, std::size_t c);

bool allFinite(std::span<const double> values) noexcept;

}  // namespace repsim

#endif  // REPSIM_MATRIX_HPP
