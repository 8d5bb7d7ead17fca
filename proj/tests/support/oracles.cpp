#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace repsim::oracle {

Dense toDense(const Matrix& m) {
  Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.front().size();
  Dense out(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i][t] * b[t][j];
      out[i][j] = s;
    }
  return out;
}

Dense transpose(const Dense& a) {
  Dense out(a.front().size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
  return out;
}

Matrix naiveMatmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < a.cols(); ++t) s += a(i, t) * b(t, j);
      out(i, j) = s;
    }
  return out;
}

Dense naiveGram(const Matrix& x) {
  Dense k(x.rows(), std::vector<double>(x.rows()));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) s += x(i, c) * x(j, c);
      k[i][j] = s;
    }
  return k;
}

Dense explicitCentering(const Dense& k) {
  const std::size_t n = k.size();
  Dense h(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i][j] = (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
  return multiply(multiply(h, k), h);
}

double naiveHsic0(const Dense& k, const Dense& l) {
  const Dense kc = explicitCentering(k);
  const Dense lc = explicitCentering(l);
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j) s += kc[i][j] * lc[i][j];
  const double m1 = static_cast<double>(k.size()) - 1.0;
  return s / (m1 * m1);
}

double naiveHsic1(const Dense& k, const Dense& l) {
  const std::size_t n = k.size();
  Dense kt = k, lt = l;
  for (std::size_t i = 0; i < n; ++i) kt[i][i] = lt[i][i] = 0.0;
  const Dense prod = multiply(kt, lt);
  double trace = 0.0, oneK = 0.0, oneL = 0.0, oneKL = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += prod[i][i];
    for (std::size_t j = 0; j < n; ++j) {
      oneK += kt[i][j];
      oneL += lt[i][j];
      oneKL += prod[i][j];
    }
  }
  const double nd = static_cast<double>(n);
  return (trace + oneK * oneL / ((nd - 1) * (nd - 2)) - 2.0 / (nd - 2) * oneKL) / (nd * (nd - 3));
}

double naiveCkaBiased(const Matrix& x, const Matrix& y) {
  const Dense k = naiveGram(x), l = naiveGram(y);
  return naiveHsic0(k, l) / std::sqrt(naiveHsic0(k, k) * naiveHsic0(l, l));
}

double naiveCkaUnbiased(const Matrix& x, const Matrix& y) {
  const Dense k = naiveGram(x), l = naiveGram(y);
  return naiveHsic1(k, l) / std::sqrt(naiveHsic1(k, k) * naiveHsic1(l, l));
}

namespace {

double betaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIt = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIt; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incompleteBeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lnFront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(lnFront);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betaContinuedFraction(a, b, x) / a;
  return 1.0 - front * betaContinuedFraction(b, a, 1.0 - x) / b;
}

WelchOracle welch(const std::vector<double>& a, const std::vector<double>& b) {
  auto meanOf = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto varOf = [&](const std::vector<double>& v) {
    const double mu = meanOf(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
  };
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = varOf(a), vb = varOf(b);
  const double t = (meanOf(a) - meanOf(b)) / std::sqrt(va / na + vb / nb);
  const double num = (va / na + vb / nb) * (va / na + vb / nb);
  const double den = (va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1);
  const double df = num / den;
  const double p = incompleteBeta(df / 2.0, 0.5, df / (df + t * t));
  return {t, df, p};
}

std::vector<double> holmSidak(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return p[x] < p[y]; });
  std::vector<double> sortedAdj(m);
  for (std::size_t i = 0; i < m; ++i) {
    sortedAdj[i] = 1.0 - std::pow(1.0 - p[idx[i]], static_cast<double>(m - i));
  }
  for (std::size_t i = 1; i < m; ++i) sortedAdj[i] = std::max(sortedAdj[i], sortedAdj[i - 1]);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[idx[i]] = std::min(1.0, sortedAdj[i]);
  return out;
}

}  // namespace repsim::oracle
