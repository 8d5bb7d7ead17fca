#include "repsim/blockstruct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "repsim/error.hpp"

namespace repsim {

namespace {

double boundaryMean(const CkaHeatmap& h, std::size_t a, std::size_t b, bool& any) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = a; i <= b; ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      if (j >= a && j <= b) continue;
      if (auto v = h.at(i, j)) {
        sum += *v;
        ++count;
      }
    }
  }
  any = count > 0;
  return any ? sum / static_cast<double>(count) : 0.0;
}

bool ranksBefore(const Block& x, const Block& y) {
  if (x.size() != y.size()) return x.size() > y.size();
  if (x.meanInsideCka != y.meanInsideCka) return x.meanInsideCka > y.meanInsideCka;
  return x.startLayer < y.startLayer;
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return m;
}

}  // namespace

std::optional<Block> BlockReport::primary() const {
  if (blocks.empty()) return std::nullopt;
  return *std::min_element(blocks.begin(), blocks.end(), ranksBefore);
}

BlockReport detectBlocks(const CkaHeatmap& h, double threshold, std::size_t minSize) {
  if (!h.isSquare()) {
    throw DimensionError("detectBlocks: heatmap must be square, got " +
                         std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  if (minSize == 0) throw InvalidArgumentError("detectBlocks: minSize must be at least 1");
  if (!std::isfinite(threshold)) throw InvalidArgumentError("detectBlocks: threshold must be finite");

  const std::size_t n = h.rows();
  const double floor = threshold - kBlockEntrySlack;
  std::vector<Block> candidates;

  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = a; b < n; ++b) {
      // Grow the square [a, b]^2 by its new last row and column.
      bool ok = true;
      for (std::size_t k = a; k <= b && ok; ++k) {
        const auto rowEntry = h.at(b, k);
        const auto colEntry = k == b ? rowEntry : h.at(k, b);
        if (!rowEntry || !colEntry || *rowEntry < floor || *colEntry < floor) {
          ok = false;
          break;
        }
        sum += *rowEntry;
        if (k != b) sum += *colEntry;
      }
      // Every larger square contains the offending entry.
      if (!ok) break;
      const std::size_t len = b - a + 1;
      const double mean = sum / static_cast<double>(len * len);
      if (len >= minSize && mean >= threshold) {
        candidates.push_back(Block{a, b, mean, 0.0});
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(), ranksBefore);
  BlockReport report;
  report.threshold = threshold;
  report.minSize = minSize;
  for (const auto& c : candidates) {
    const bool overlaps = std::any_of(report.blocks.begin(), report.blocks.end(),
                                      [&](const Block& k) {
                                        return c.startLayer <= k.endLayer &&
                                               k.startLayer <= c.endLayer;
                                      });
    if (!overlaps) report.blocks.push_back(c);
  }
  for (auto& blk : report.blocks) {
    bool any = false;
    const double outside = boundaryMean(h, blk.startLayer, blk.endLayer, any);
    blk.meanBoundaryContrast = any ? blk.meanInsideCka - outside : 0.0;
  }
  std::sort(report.blocks.begin(), report.blocks.end(),
            [](const Block& x, const Block& y) { return x.startLayer < y.startLayer; });
  return report;
}

SeedVariability blockSeedVariability(std::span<const BlockReport> reports) {
  if (reports.empty()) throw InvalidArgumentError("blockSeedVariability: no reports");
  SeedVariability out;
  out.seedCount = reports.size();
  std::vector<double> starts;
  std::vector<double> ends;
  std::vector<double> sizes;
  for (const auto& r : reports) {
    auto p = r.primary();
    out.present.push_back(p.has_value());
    out.primaryBlocks.push_back(p);
    if (p) {
      starts.push_back(static_cast<double>(p->startLayer));
      ends.push_back(static_cast<double>(p->endLayer));
      sizes.push_back(static_cast<double>(p->size()));
    }
  }
  out.presenceRate = static_cast<double>(starts.size()) / static_cast<double>(reports.size());
  const auto s = moments(starts);
  const auto e = moments(ends);
  const auto z = moments(sizes);
  out.meanStart = s.mean;
  out.stddevStart = s.stddev;
  out.meanEnd = e.mean;
  out.stddevEnd = e.stddev;
  out.meanSize = z.mean;
  out.stddevSize = z.stddev;
  return out;
}

}  // namespace repsim
