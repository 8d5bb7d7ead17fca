#ifndef REPSIM_BLOCKSTRUCT_HPP
#define REPSIM_BLOCKSTRUCT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "repsim/heatmap.hpp"

namespace repsim {

struct Block {
  std::size_t startLayer = 0;
  std::size_t endLayer = 0;  ///< inclusive
  double meanInsideCka = 0.0;
  /// meanInsideCka minus the mean of the block rows outside the block
  /// columns; 0 when the block spans the whole heatmap.
  double meanBoundaryContrast = 0.0;

  std::size_t size() const noexcept { return endLayer - startLayer + 1; }
  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockReport {
  std::vector<Block> blocks;  ///< sorted by start, non-overlapping
  double threshold = 0.9;
  std::size_t minSize = 5;

  /// Longest block; ties go to higher mean CKA, then lower start.
  std::optional<Block> primary() const;
};

/// Permitted shortfall of any single entry below the threshold.
inline constexpr double kBlockEntrySlack = 0.1;

/// Finds contiguous diagonal intervals [a, b] of a square heatmap whose
/// (b-a+1)^2 square has mean >= threshold and every entry >= threshold - 0.1.
/// Candidates of at least `minSize` layers are taken greedily, longest first
/// (ties: higher mean, then lower start), discarding any that overlap an
/// already accepted block. Missing entries fail the entry test.
///
/// This is a heuristic; both parameters are user-facing.
BlockReport detectBlocks(const CkaHeatmap& h, double threshold = 0.9,
                         std::size_t minSize = 5);

struct SeedVariability {
  std::size_t seedCount = 0;
  std::vector<bool> present;
  std::vector<std::optional<Block>> primaryBlocks;
  double presenceRate = 0.0;
  // Statistics over seeds that have a block; sample standard deviation,
  // 0 with fewer than two such seeds.
  double meanStart = 0.0;
  double stddevStart = 0.0;
  double meanEnd = 0.0;
  double stddevEnd = 0.0;
  double meanSize = 0.0;
  double stddevSize = 0.0;
};

/// Summarizes how the primary block moves across seeds of one architecture.
/// Throws InvalidArgumentError on an empty list.
SeedVariability blockSeedVariability(std::span<const BlockReport> reports);

}  // namespace repsim

#endif  // REPSIM_BLOCKSTRUCT_HPP
