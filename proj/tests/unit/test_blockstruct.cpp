#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "repsim/blockstruct.hpp"
#include "repsim/cka.hpp"
#include "repsim/error.hpp"
#include "repsim/rng.hpp"

namespace repsim {
namespace {

CkaHeatmap relabeled(const CkaHeatmap& h, const std::string& prefix) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < h.rows(); ++i) names.push_back(prefix + std::to_string(h.rows() - i));
  CkaHeatmap out(names, names);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) out.set(i, j, *h.at(i, j));
  return out;
}

CkaHeatmap transposed(const CkaHeatmap& h) {
  CkaHeatmap out(h.colNames(), h.rowNames());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) out.set(j, i, *h.at(i, j));
  return out;
}

// Symmetric heatmap with a few noisy planted squares.
CkaHeatmap randomStructured(Rng& rng, std::size_t n) {
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) v[i * n + j] = v[j * n + i] = 0.2 + 0.3 * rng.uniform();
  for (int b = 0; b < 3; ++b) {
    const std::size_t s = rng.below(n - 3);
    const std::size_t e = std::min(n - 1, s + 2 + rng.below(8));
    const double level = 0.8 + 0.2 * rng.uniform();
    for (std::size_t i = s; i <= e; ++i)
      for (std::size_t j = i; j <= e; ++j)
        v[i * n + j] = v[j * n + i] = std::min(1.0, level + 0.05 * (rng.uniform() - 0.5));
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("l" + std::to_string(i));
  CkaHeatmap h(names, names);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h.set(i, j, i == j ? 1.0 : v[i * n + j]);
  return h;
}

TEST(DetectBlocks, NoStructureMeansNoBlocks) {
  const CkaHeatmap h = fixture::plantedHeatmap(12, 0, 0, 0.1, 0.1);
  EXPECT_TRUE(detectBlocks(h, 0.9, 2).blocks.empty());
}

TEST(DetectBlocks, PlantedSquareFoundExactly) {
  const CkaHeatmap h = fixture::plantedHeatmap(30, 10, 20, 0.98, 0.2);
  const BlockReport r = detectBlocks(h);
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].startLayer, 10u);
  EXPECT_EQ(r.blocks[0].endLayer, 20u);
  EXPECT_GE(r.blocks[0].meanInsideCka, 0.98);
  EXPECT_NEAR(r.blocks[0].meanBoundaryContrast, r.blocks[0].meanInsideCka - 0.2, 1e-12);
  EXPECT_EQ(r.threshold, 0.9);
  EXPECT_EQ(r.minSize, 5u);
  EXPECT_EQ(r.primary(), r.blocks[0]);
}

TEST(DetectBlocks, TwoBlocksSortedAndNonOverlapping) {
  CkaHeatmap h = fixture::plantedHeatmap(20, 2, 7, 0.95, 0.1);
  for (std::size_t i = 12; i <= 18; ++i)
    for (std::size_t j = 12; j <= 18; ++j)
      if (i != j) h.set(i, j, 0.93);
  const BlockReport r = detectBlocks(h, 0.9, 3);
  ASSERT_EQ(r.blocks.size(), 2u);
  EXPECT_EQ(r.blocks[0], (Block{2, 7, r.blocks[0].meanInsideCka, r.blocks[0].meanBoundaryContrast}));
  EXPECT_EQ(r.blocks[1].startLayer, 12u);
  EXPECT_EQ(r.blocks[1].endLayer, 18u);
  EXPECT_EQ(r.primary()->startLayer, 12u);  // longest wins
}

TEST(DetectBlocks, SingleLowEntryBreaksSquare) {
  CkaHeatmap h = fixture::plantedHeatmap(10, 0, 9, 0.99, 0.0);
  h.set(0, 9, 0.75);
  h.set(9, 0, 0.75);
  const BlockReport r = detectBlocks(h, 0.9, 5);
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].size(), 9u);
  // Equal-length candidates [0,8] and [1,9] have equal means; lower start wins.
  EXPECT_EQ(r.blocks[0].startLayer, 0u);
}

TEST(DetectBlocks, WholeHeatmapBlockHasZeroContrast) {
  const CkaHeatmap h = fixture::plantedHeatmap(6, 0, 5, 0.97, 0.0);
  const BlockReport r = detectBlocks(h, 0.9, 5);
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].meanBoundaryContrast, 0.0);
}

TEST(DetectBlocks, MissingEntriesFailTheSquare) {
  CkaHeatmap h = fixture::plantedHeatmap(8, 0, 7, 0.99, 0.0);
  h.setMissing(4, 4);
  const BlockReport r = detectBlocks(h, 0.9, 4);
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].startLayer, 0u);
  EXPECT_EQ(r.blocks[0].endLayer, 3u);
}

TEST(DetectBlocks, Errors) {
  CkaHeatmap rect({"a", "b"}, {"a"});
  EXPECT_THROW(detectBlocks(rect), DimensionError);
  EXPECT_THROW(detectBlocks(fixture::plantedHeatmap(3, 0, 0, 0, 0), 0.9, 0), InvalidArgumentError);
}

TEST(DetectBlocks, InvariantToRelabelingAndTransposition) {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const CkaHeatmap h = randomStructured(rng, 24);
    const auto base = detectBlocks(h, 0.85, 3).blocks;
    EXPECT_EQ(detectBlocks(relabeled(h, "x"), 0.85, 3).blocks, base);
    EXPECT_EQ(detectBlocks(transposed(h), 0.85, 3).blocks, base);
  }
}

// Every interval found at a higher threshold overlaps one at least as large
// found at any lower threshold: raising the threshold never enlarges blocks.
TEST(DetectBlocks, ThresholdMonotonicity) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const CkaHeatmap h = randomStructured(rng, 24);
    for (double lo : {0.7, 0.8, 0.85}) {
      const auto low = detectBlocks(h, lo, 3).blocks;
      for (double hi : {lo + 0.02, lo + 0.05, lo + 0.1}) {
        for (const Block& b : detectBlocks(h, hi, 3).blocks) {
          bool covered = false;
          for (const Block& a : low) {
            if (a.startLayer <= b.endLayer && b.startLayer <= a.endLayer && a.size() >= b.size())
              covered = true;
          }
          EXPECT_TRUE(covered) << "trial " << t << " block [" << b.startLayer << ","
                               << b.endLayer << "] at " << hi << " vs " << lo;
        }
      }
    }
  }
}

TEST(DetectBlocks, SharedPcFixtureEndToEnd) {
  const LayerSet set = fixture::sharedPcLayers(14, 200, 16, 4, 10, 60.0, 3);
  const CkaHeatmap h = heatmap(set, {HeatmapMode::kFull, Estimator::kBiased, {}});
  const BlockReport r = detectBlocks(h);
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].startLayer, 4u);
  EXPECT_EQ(r.blocks[0].endLayer, 10u);
}

TEST(BlockSeedVariability, IdenticalReportsHaveZeroDispersion) {
  const BlockReport r = detectBlocks(fixture::plantedHeatmap(20, 5, 12, 0.97, 0.1));
  const std::vector<BlockReport> reports(4, r);
  const SeedVariability v = blockSeedVariability(reports);
  EXPECT_EQ(v.seedCount, 4u);
  EXPECT_EQ(v.presenceRate, 1.0);
  EXPECT_EQ(v.meanStart, 5.0);
  EXPECT_EQ(v.stddevStart, 0.0);
  EXPECT_EQ(v.stddevEnd, 0.0);
  EXPECT_EQ(v.stddevSize, 0.0);
}

TEST(BlockSeedVariability, PresenceRateCountsSeeds) {
  std::vector<BlockReport> reports;
  for (int s = 0; s < 4; ++s) reports.push_back(detectBlocks(fixture::plantedHeatmap(20, 5, 12, 0.97, 0.1)));
  reports.push_back(detectBlocks(fixture::plantedHeatmap(20, 0, 0, 0.1, 0.1)));
  const SeedVariability v = blockSeedVariability(reports);
  EXPECT_DOUBLE_EQ(v.presenceRate, 0.8);
  EXPECT_FALSE(v.present[4]);
  EXPECT_FALSE(v.primaryBlocks[4].has_value());
}

TEST(BlockSeedVariability, ShiftedBlocksMatchDirectStatistics) {
  const std::vector<std::pair<std::size_t, std::size_t>> spans{{3, 9}, {5, 12}, {4, 10}, {6, 15}};
  std::vector<BlockReport> reports;
  for (auto [s, e] : spans) reports.push_back(detectBlocks(fixture::plantedHeatmap(20, s, e, 0.97, 0.1)));
  const SeedVariability v = blockSeedVariability(reports);

  auto stats = [](std::vector<double> x) {
    double mu = 0.0;
    for (double e : x) mu += e;
    mu /= x.size();
    double ss = 0.0;
    for (double e : x) ss += (e - mu) * (e - mu);
    return std::pair{mu, std::sqrt(ss / (x.size() - 1))};
  };
  const auto [ms, ss] = stats({3, 5, 4, 6});
  const auto [me, se] = stats({9, 12, 10, 15});
  const auto [mz, sz] = stats({7, 8, 7, 10});
  EXPECT_NEAR(v.meanStart, ms, 1e-12);
  EXPECT_NEAR(v.stddevStart, ss, 1e-12);
  EXPECT_NEAR(v.meanEnd, me, 1e-12);
  EXPECT_NEAR(v.stddevEnd, se, 1e-12);
  EXPECT_NEAR(v.meanSize, mz, 1e-12);
  EXPECT_NEAR(v.stddevSize, sz, 1e-12);
}

TEST(BlockSeedVariability, EmptyListRejected) {
  EXPECT_THROW(blockSeedVariability({}), InvalidArgumentError);
}

}  // namespace
}  // namespace repsim
