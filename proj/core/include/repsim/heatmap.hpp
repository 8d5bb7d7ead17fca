#ifndef REPSIM_HEATMAP_HPP
#define REPSIM_HEATMAP_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace repsim {

/// Labelled matrix of pairwise layer similarities (rows: layers of model A,
/// columns: layers of model B).
///
/// Entries that could not be computed, e.g. because a layer is constant, are
/// stored as missing rather than filled with a made-up value. The reason is
/// appended to `diagnostics()`.
class CkaHeatmap {
 public:
  /// All entries start missing.
  CkaHeatmap(std::vector<std::string> rowNames,
             std::vector<std::string> colNames);

  std::size_t rows() const noexcept { return rowNames_.size(); }
  std::size_t cols() const noexcept { return colNames_.size(); }
  bool isSquare() const noexcept { return rows() == cols(); }

  const std::vector<std::string>& rowNames() const noexcept { return rowNames_; }
  const std::vector<std::string>& colNames() const noexcept { return colNames_; }

  std::optional<double> at(std::size_t i, std::size_t j) const;
  /// Value, or NaN when missing.
  double valueOrNan(std::size_t i, std::size_t j) const;
  bool missing(std::size_t i, std::size_t j) const;
  std::size_t missingCount() const noexcept;

  void set(std::size_t i, std::size_t j, double value);
  void setMissing(std::size_t i, std::size_t j);

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }
  void addDiagnostic(std::string message) { diagnostics_.push_back(std::move(message)); }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::vector<std::string> rowNames_;
  std::vector<std::string> colNames_;
  std::vector<std::optional<double>> values_;
  std::vector<std::string> diagnostics_;
};

}  // namespace repsim

#endif  // REPSIM_HEATMAP_HPP
