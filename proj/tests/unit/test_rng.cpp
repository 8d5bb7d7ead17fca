#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "repsim/rng.hpp"

namespace repsim {
namespace {

TEST(SplitMix64, ReferenceSequence) {
  SplitMix64 sm(1234567);
  const std::uint64_t expected[] = {6457827717110365317ULL, 3203168211198807973ULL,
                                    9817491932198370423ULL, 4593380528125082431ULL,
                                    16408922859458223821ULL};
  for (auto e : expected) EXPECT_EQ(sm.next(), e);
}

// Golden values from an independent Python transcription of the seeding
// scheme and xoshiro256**; pins cross-platform reproducibility.
TEST(Rng, GoldenOutputs) {
  Rng a(42);
  EXPECT_EQ(a.next(), 2730308759528706450ULL);
  EXPECT_EQ(a.next(), 17144795137417400848ULL);
  EXPECT_EQ(a.next(), 193425411819345167ULL);
  Rng b(42, 7);
  EXPECT_EQ(b.next(), 802171766300567288ULL);
  EXPECT_EQ(b.next(), 6084375627890838298ULL);
  EXPECT_EQ(b.next(), 1587821699771483836ULL);
}

TEST(Rng, StreamsDiffer) {
  Rng a(5, 0), b(5, 1), c(6, 0);
  const auto x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.5);  // 99.9% quantile of chi-square with 6 df
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(10);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Rng, PermutationIsAPermutation) {
  Rng rng(11);
  auto p = permutation(100, rng);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  Rng again(11);
  EXPECT_EQ(permutation(100, again), p);
}

TEST(Rng, ShuffleFirstPositionIsUniform) {
  Rng rng(12);
  std::vector<int> counts(5, 0);
  for (int t = 0; t < 50000; ++t) ++counts[permutation(5, rng)[0]];
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

}  // namespace
}  // namespace repsim
