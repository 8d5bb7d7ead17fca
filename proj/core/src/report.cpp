#include "repsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "repsim/dump_format.hpp"
#include "repsim/error.hpp"

namespace repsim {

namespace {

constexpr std::string_view kMissing = "NA";

std::string quoteField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> splitCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool fieldStarted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      fieldStarted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      fieldStarted = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (fieldStarted || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      fieldStarted = false;
    } else {
      field += c;
      fieldStarted = true;
    }
  }
  if (quoted) throw IoError(IoErrorKind::kMalformedText, "unterminated quoted CSV field");
  if (fieldStarted || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string formatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string heatmapToCsv(const CkaHeatmap& h) {
  std::string out = "layer";
  for (const auto& name : h.colNames()) out += "," + quoteField(name);
  out += '\n';
  for (std::size_t i = 0; i < h.rows(); ++i) {
    out += quoteField(h.rowNames()[i]);
    for (std::size_t j = 0; j < h.cols(); ++j) {
      out += ',';
      const auto v = h.at(i, j);
      out += v ? formatDouble(*v) : std::string(kMissing);
    }
    out += '\n';
  }
  return out;
}

CkaHeatmap heatmapFromCsv(std::string_view csv) {
  const auto rows = splitCsv(csv);
  if (rows.empty()) throw IoError(IoErrorKind::kMalformedText, "empty heatmap CSV");
  const auto& header = rows.front();
  std::vector<std::string> colNames(header.begin() + 1, header.end());
  std::vector<std::string> rowNames;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw IoError(IoErrorKind::kMalformedText,
                    "CSV row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " fields, header has " + std::to_string(header.size()));
    }
    rowNames.push_back(rows[r].front());
  }
  CkaHeatmap h(std::move(rowNames), std::move(colNames));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (std::size_t c = 1; c < header.size(); ++c) {
      const std::string& f = rows[r][c];
      if (f == kMissing) continue;
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw IoError(IoErrorKind::kMalformedText, "CSV value '" + f + "' is not a number");
      }
      h.set(r - 1, c - 1, v);
    }
  }
  return h;
}

std::vector<std::uint8_t> heatmapToPgm(const CkaHeatmap& h) {
  if (h.rows() == 0 || h.cols() == 0) {
    throw InvalidArgumentError("cannot render an empty heatmap");
  }
  const std::string header =
      "P5\n" + std::to_string(h.cols()) + " " + std::to_string(h.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + h.rows() * h.cols());
  for (std::size_t imageRow = 0; imageRow < h.rows(); ++imageRow) {
    const std::size_t i = h.rows() - 1 - imageRow;  // layer 0 at the bottom
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const auto v = h.at(i, j);
      const double clamped = v ? std::clamp(*v, 0.0, 1.0) : 0.0;
      out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * clamped)));
    }
  }
  return out;
}

void emitHeatmap(const CkaHeatmap& h, const std::filesystem::path& csvPath,
                 const std::optional<std::filesystem::path>& imagePath) {
  const std::string csv = heatmapToCsv(h);
  writeFileBytes(csvPath, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  if (imagePath) writeFileBytes(*imagePath, heatmapToPgm(h));
}

CkaHeatmap readHeatmapCsv(const std::filesystem::path& path) {
  const auto bytes = readFileBytes(path);
  return heatmapFromCsv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace repsim
