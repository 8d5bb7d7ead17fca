#include "repsim/gram.hpp"

#include <string>

#include "repsim/error.hpp"

namespace repsim {

namespace {

void requireRaw(const GramMatrix& g, const char* op) {
  if (g.variant() != GramVariant::kRaw) {
    throw InvalidArgumentError(std::string(op) + ": expected a raw Gram matrix");
  }
}

void requireSameSize(const GramMatrix& k, const GramMatrix& l, const char* op) {
  if (k.n() != l.n()) {
    throw DimensionError(std::string(op) + ": Gram sizes differ (" +
                         std::to_string(k.n()) + " vs " + std::to_string(l.n()) + ")");
  }
}

}  // namespace

GramMatrix::GramMatrix(std::size_t n, std::vector<double> values, GramVariant variant)
    : n_(n), values_(std::move(values)), variant_(variant) {
  if (n_ == 0 || values_.size() != n_ * n_) {
    throw DimensionError("GramMatrix: expected " + std::to_string(n_ * n_) +
                         " values, got " + std::to_string(values_.size()));
  }
}

GramMatrix gram(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    for (std::size_t j = i; j < n; ++j) {
      const double* xj = x.row(j).data();
      double dot = 0.0;
      for (std::size_t c = 0; c < p; ++c) dot += xi[c] * xj[c];
      k[i * n + j] = dot;
      k[j * n + i] = dot;
    }
  }
  return GramMatrix(n, std::move(k), GramVariant::kRaw);
}

GramMatrix center(const GramMatrix& g) {
  requireRaw(g, "center");
  const std::size_t n = g.n();
  const auto v = g.values();
  // K' = K - r 1^T - 1 r^T + mean, with r the row means (K is symmetric).
  std::vector<double> rowMean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += v[i * n + j];
    rowMean[i] = s / static_cast<double>(n);
    total += s;
  }
  const double grand = total / (static_cast<double>(n) * static_cast<double>(n));
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c = v[i * n + j] - rowMean[i] - rowMean[j] + grand;
      out[i * n + j] = c;
      out[j * n + i] = c;
    }
  }
  return GramMatrix(n, std::move(out), GramVariant::kCentered);
}

GramMatrix zeroDiagonal(const GramMatrix& g) {
  requireRaw(g, "zeroDiagonal");
  std::vector<double> out(g.values().begin(), g.values().end());
  for (std::size_t i = 0; i < g.n(); ++i) out[i * g.n() + i] = 0.0;
  return GramMatrix(g.n(), std::move(out), GramVariant::kDiagonalZeroed);
}

double hsic0Centered(const GramMatrix& kc, const GramMatrix& lc) {
  requireSameSize(kc, lc, "hsic0");
  if (kc.variant() != GramVariant::kCentered || lc.variant() != GramVariant::kCentered) {
    throw InvalidArgumentError("hsic0Centered: expected centered Gram matrices");
  }
  const std::size_t m = kc.n();
  if (m < 2) throw DimensionError("hsic0: needs at least 2 examples");
  const auto a = kc.values();
  const auto b = lc.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double denom = static_cast<double>(m - 1);
  return dot / (denom * denom);
}

double hsic0(const GramMatrix& k, const GramMatrix& l) {
  requireRaw(k, "hsic0");
  requireRaw(l, "hsic0");
  requireSameSize(k, l, "hsic0");
  if (k.n() < 2) throw DimensionError("hsic0: needs at least 2 examples");
  return hsic0Centered(center(k), center(l));
}

double hsic1(const GramMatrix& k, const GramMatrix& l) {
  requireRaw(k, "hsic1");
  requireRaw(l, "hsic1");
  requireSameSize(k, l, "hsic1");
  const std::size_t n = k.n();
  if (n < 4) {
    throw DimensionError("hsic1: needs at least 4 examples, got " + std::to_string(n));
  }
  const auto kv = k.values();
  const auto lv = l.values();

  double trace = 0.0;  // tr(K~ L~) = sum_{i != j} K_ij L_ij for symmetric inputs
  double sumK = 0.0;   // 1^T K~ 1
  double sumL = 0.0;
  double rowDot = 0.0; // 1^T K~ L~ 1 = (K~ 1) . (L~ 1)
  for (std::size_t i = 0; i < n; ++i) {
    double rowK = 0.0;
    double rowL = 0.0;
    double tr = 0.0;
    const double* ki = kv.data() + i * n;
    const double* li = lv.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      tr += ki[j] * li[j];
      rowK += ki[j];
      rowL += li[j];
    }
    trace += tr;
    sumK += rowK;
    sumL += rowL;
    rowDot += rowK * rowL;
  }

  const double nd = static_cast<double>(n);
  const double term2 = sumK * sumL / ((nd - 1.0) * (nd - 2.0));
  const double term3 = 2.0 / (nd - 2.0) * rowDot;
  return (trace + term2 - term3) / (nd * (nd - 3.0));
}

}  // namespace repsim
