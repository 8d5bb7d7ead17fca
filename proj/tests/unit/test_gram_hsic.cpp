#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "repsim/error.hpp"
#include "repsim/gram.hpp"
#include "repsim/rng.hpp"

namespace repsim {
namespace {

TEST(Gram, OrthonormalRowsGiveIdentity) {
  Rng rng(1);
  const Matrix q = fixture::randomOrthogonal(5, rng);
  const GramMatrix g = gram(q);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Gram, HandCheck) {
  const GramMatrix g = gram(Matrix{{1, 0}, {0, 2}});
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_EQ(g(1, 1), 4.0);
  EXPECT_EQ(g.variant(), GramVariant::kRaw);
}

TEST(Gram, MatchesNaiveLoopAndIsSymmetricPsd) {
  Rng rng(2);
  const Matrix x = fixture::gaussian(6, 3, rng);
  const GramMatrix g = gram(x);
  const auto ref = oracle::naiveGram(x);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_NEAR(g(i, j), ref[i][j], 1e-12);
      EXPECT_EQ(g(i, j), g(j, i));
    }
  // Rank-3 PSD: x^T K x >= 0 for random x.
  for (int t = 0; t < 20; ++t) {
    std::vector<double> v(6);
    for (double& e : v) e = rng.normal();
    double q = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) q += v[i] * g(i, j) * v[j];
    EXPECT_GE(q, -1e-10);
  }
}

TEST(Center, ConstantRowsGiveZero) {
  const GramMatrix c = center(gram(Matrix{{1, 2}, {1, 2}, {1, 2}}));
  for (double v : c.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Center, MatchesExplicitProductAndHasZeroMeans) {
  Rng rng(3);
  const Matrix x = fixture::gaussian(9, 4, rng, 2.0);
  const GramMatrix c = center(gram(x));
  EXPECT_EQ(c.variant(), GramVariant::kCentered);
  const auto ref = oracle::explicitCentering(oracle::naiveGram(x));
  for (std::size_t i = 0; i < 9; ++i) {
    double rowSum = 0.0, colSum = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
      EXPECT_NEAR(c(i, j), ref[i][j], 1e-10);
      rowSum += c(i, j);
      colSum += c(j, i);
    }
    EXPECT_NEAR(rowSum / 9, 0.0, 1e-10);
    EXPECT_NEAR(colSum / 9, 0.0, 1e-10);
  }
}

TEST(Center, IsIdempotentAsAProjection) {
  Rng rng(4);
  const GramMatrix c = center(gram(fixture::gaussian(7, 3, rng)));
  std::vector<std::vector<double>> dense(7, std::vector<double>(7));
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) dense[i][j] = c(i, j);
  const auto twice = oracle::explicitCentering(dense);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(twice[i][j], c(i, j), 1e-12);
}

TEST(Center, RequiresRawVariant) {
  const GramMatrix c = center(gram(Matrix{{1}, {2}}));
  EXPECT_THROW(center(c), InvalidArgumentError);
  EXPECT_THROW(hsic0(c, c), InvalidArgumentError);
  EXPECT_THROW(hsic1(zeroDiagonal(gram(Matrix{{1}, {2}, {3}, {4}})),
                     gram(Matrix{{1}, {2}, {3}, {4}})),
               InvalidArgumentError);
}

TEST(ZeroDiagonal, ExactZeros) {
  Rng rng(5);
  const GramMatrix z = zeroDiagonal(gram(fixture::gaussian(5, 2, rng)));
  EXPECT_EQ(z.variant(), GramVariant::kDiagonalZeroed);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(z(i, i), 0.0);
}

TEST(Hsic0, ConstantFeaturesGiveZero) {
  Rng rng(6);
  const GramMatrix k = gram(Matrix{{3, 1}, {3, 1}, {3, 1}, {3, 1}});
  const GramMatrix l = gram(fixture::gaussian(4, 2, rng));
  EXPECT_NEAR(hsic0(k, l), 0.0, 1e-12);
}

TEST(Hsic0, HandComputation) {
  const GramMatrix k = gram(Matrix{{1}, {-1}});
  EXPECT_DOUBLE_EQ(hsic0(k, k), 4.0);
}

TEST(Hsic0, MatchesElementwiseOracleAndIsSymmetric) {
  Rng rng(7);
  const Matrix x = fixture::gaussian(7, 2, rng);
  const Matrix y = fixture::gaussian(7, 3, rng);
  const double ref = oracle::naiveHsic0(oracle::naiveGram(x), oracle::naiveGram(y));
  EXPECT_NEAR(hsic0(gram(x), gram(y)), ref, 1e-12 * std::max(1.0, std::abs(ref)));
  EXPECT_EQ(hsic0(gram(x), gram(y)), hsic0(gram(y), gram(x)));
  EXPECT_GE(hsic0(gram(x), gram(y)), -1e-10);
}

TEST(Hsic0, SizeErrors) {
  EXPECT_THROW(hsic0(gram(Matrix{{1}}), gram(Matrix{{2}})), DimensionError);
  EXPECT_THROW(hsic0(gram(Matrix{{1}, {2}}), gram(Matrix{{1}, {2}, {3}})), DimensionError);
}

TEST(Hsic1, RequiresFourExamples) {
  const GramMatrix k = gram(Matrix{{1}, {2}, {4}});
  EXPECT_THROW(hsic1(k, k), DimensionError);
  EXPECT_THROW(hsic1(gram(Matrix{{1}, {2}, {3}, {4}}), gram(Matrix{{1}, {2}, {3}, {4}, {5}})),
               DimensionError);
}

TEST(Hsic1, ConstantFeaturesCancel) {
  Rng rng(8);
  for (std::size_t n : {4u, 10u, 64u}) {
    Matrix c(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      c(i, 0) = 1.5;
      c(i, 1) = -2.0;
      c(i, 2) = 0.25;
    }
    const GramMatrix l = gram(fixture::gaussian(n, 4, rng));
    EXPECT_NEAR(hsic1(gram(c), l), 0.0, 1e-12) << n;
    EXPECT_NEAR(hsic1(l, gram(c)), 0.0, 1e-12) << n;
  }
}

TEST(Hsic1, MatchesNaiveEvaluation) {
  Rng rng(9);
  const Matrix x = fixture::gaussian(10, 4, rng);
  const Matrix y = fixture::gaussian(10, 4, rng);
  const double ref = oracle::naiveHsic1(oracle::naiveGram(x), oracle::naiveGram(y));
  const double got = hsic1(gram(x), gram(y));
  EXPECT_LT(std::abs(got - ref), 1e-10 * std::abs(ref));
  EXPECT_NEAR(hsic1(gram(y), gram(x)), got, 1e-14 * std::abs(got));
}

TEST(Hsic, OrthogonalInvariance) {
  Rng rng(10);
  const Matrix x = fixture::gaussian(20, 6, rng);
  const Matrix y = fixture::gaussian(20, 5, rng);
  const Matrix xq = matmul(x, fixture::randomOrthogonal(6, rng));
  const double h0 = hsic0(gram(x), gram(y));
  const double h1 = hsic1(gram(x), gram(y));
  EXPECT_LT(std::abs(hsic0(gram(xq), gram(y)) - h0) / std::abs(h0), 1e-8);
  EXPECT_LT(std::abs(hsic1(gram(xq), gram(y)) - h1) / std::abs(h1), 1e-8);
}

TEST(Hsic0, ScalesQuadratically) {
  Rng rng(11);
  const Matrix x = fixture::gaussian(15, 4, rng);
  const Matrix y = fixture::gaussian(15, 3, rng);
  Matrix cx = x;
  for (double& v : cx.values()) v *= 3.0;
  const double base = hsic0(gram(x), gram(y));
  EXPECT_LT(std::abs(hsic0(gram(cx), gram(y)) - 9.0 * base) / std::abs(9.0 * base), 1e-9);
}

TEST(Hsic1, IndependentFeaturesConcentrateNearZero) {
  Rng rng(12);
  const std::size_t m = 400, n = 40;
  const Matrix x = fixture::gaussian(m, 5, rng);
  const Matrix y = fixture::gaussian(m, 5, rng);
  const double full = hsic1(gram(x), gram(y));
  // Resampling spread from 200 random subsets of size n, rescaled to the
  // full size by the U-statistic 1/m rate.
  std::vector<double> vals;
  for (int t = 0; t < 200; ++t) {
    auto idx = permutation(m, rng);
    idx.resize(n);
    vals.push_back(hsic1(gram(gatherRows(x, idx)), gram(gatherRows(y, idx))));
  }
  double mu = 0.0, var = 0.0;
  for (double v : vals) mu += v;
  mu /= vals.size();
  for (double v : vals) var += (v - mu) * (v - mu);
  const double se = std::sqrt(var / (vals.size() - 1)) * static_cast<double>(n) / m;
  EXPECT_LT(std::abs(full), 5.0 * se);
}

}  // namespace
}  // namespace repsim
