#include "repsim/matrix.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "repsim/error.hpp"

namespace repsim {

namespace {

void requireShape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix must have at least one row and one column, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::string shapeOf(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_() {
  requireShape(rows, cols);
  data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  requireShape(rows, cols);
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                         " values, expected " + std::to_string(rows * cols));
  }
  if (!allFinite(data_)) {
    throw InvalidArgumentError("matrix data contains non-finite values");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::span<const float> data)
    : Matrix(rows, cols, std::vector<double>(data.begin(), data.end())) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  requireShape(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!allFinite(data_)) {
    throw InvalidArgumentError("matrix data contains non-finite values");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool allFinite(std::span<const double> values) noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shapeOf(a) + " * " + shapeOf(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix centerColumns(const Matrix& a) {
  std::vector<double> means(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) means[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(a.rows());
  for (double& m : means) m *= inv;

  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] -= means[j];
  }
  return out;
}

double frobeniusNorm(const Matrix& a) {
  double scale = 0.0;
  for (double v : a.values()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : a.values()) {
    const double s = v / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

SvdResult svd(const Matrix& a) {
  if (!allFinite(a.values())) {
    throw InvalidArgumentError("svd: input contains non-finite values");
  }
  const Eigen::Map<const RowMajor> map(a.values().data(),
                                       static_cast<Eigen::Index>(a.rows()),
                                       static_cast<Eigen::Index>(a.cols()));
  Eigen::BDCSVD<Eigen::MatrixXd> dec(map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw ConvergenceError("svd: decomposition of " + shapeOf(a) +
                           " matrix did not converge");
  }

  const Eigen::MatrixXd& u = dec.matrixU();
  const Eigen::MatrixXd& v = dec.matrixV();
  const Eigen::VectorXd& s = dec.singularValues();
  const auto r = static_cast<std::size_t>(s.size());

  SvdResult out{Matrix(a.rows(), r), std::vector<double>(r), Matrix(a.cols(), r)};
  for (std::size_t k = 0; k < r; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    // Largest-magnitude entry of each left vector is made positive; the
    // first index wins ties.
    Eigen::Index pivot = 0;
    u.col(kk).cwiseAbs().maxCoeff(&pivot);
    const double sign = u(pivot, kk) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      out.leftVectors(i, k) = sign * u(static_cast<Eigen::Index>(i), kk);
    for (std::size_t j = 0; j < a.cols(); ++j)
      out.rightVectors(j, k) = sign * v(static_cast<Eigen::Index>(j), kk);
    out.singularValues[k] = s(kk);
  }
  return out;
}

Matrix gatherRows(const Matrix& a, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DimensionError("gatherRows: empty index set");
  Matrix out(indices.size(), a.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= a.rows()) {
      throw DimensionError("gatherRows: row index " + std::to_string(indices[i]) +
                           " out of range for " + shapeOf(a));
    }
    const auto src = a.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix concatColumns(std::span<const Matrix> parts) {
  if (parts.empty()) throw DimensionError("concatColumns: nothing to concatenate");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("concatColumns: row counts differ (" +
                           std::to_string(rows) + " vs " + std::to_string(p.rows()) + ")");
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto dst = out.row(i).begin();
    for (const auto& p : parts) dst = std::copy(p.row(i).begin(), p.row(i).end(), dst);
  }
  return out;
}

std::vector<double> column(const Matrix& a, std::size_t c) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = a(i, c);
  return out;
}

}  // namespace repsim
