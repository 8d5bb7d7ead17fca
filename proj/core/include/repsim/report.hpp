#ifndef REPSIM_REPORT_HPP
#define REPSIM_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repsim/heatmap.hpp"

namespace repsim {

/// Shortest decimal text that parses back to exactly `value`.
std::string formatDouble(double value);

/// CSV with a header row of column layer names and a leading column of row
/// layer names. Values use round-trip precision; missing entries are "NA".
std::string heatmapToCsv(const CkaHeatmap& h);

/// Inverse of heatmapToCsv. Throws IoError(kMalformedText).
CkaHeatmap heatmapFromCsv(std::string_view csv);

/// Binary greyscale PGM (P5), one pixel per entry: round(255 * clamp(v, 0, 1)),
/// missing entries black. Row 0 of the heatmap is the bottom image row.
std::vector<std::uint8_t> heatmapToPgm(const CkaHeatmap& h);

void emitHeatmap(const CkaHeatmap& h, const std::filesystem::path& csvPath,
                 const std::optional<std::filesystem::path>& imagePath = std::nullopt);

CkaHeatmap readHeatmapCsv(const std::filesystem::path& path);

}  // namespace repsim

#endif  // REPSIM_REPORT_HPP
