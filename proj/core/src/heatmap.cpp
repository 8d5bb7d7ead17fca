#include "repsim/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "repsim/error.hpp"

namespace repsim {

CkaHeatmap::CkaHeatmap(std::vector<std::string> rowNames,
                       std::vector<std::string> colNames)
    : rowNames_(std::move(rowNames)),
      colNames_(std::move(colNames)),
      values_(rowNames_.size() * colNames_.size()) {}

std::size_t CkaHeatmap::index(std::size_t i, std::size_t j) const {
  if (i >= rows() || j >= cols()) {
    throw DimensionError("heatmap index (" + std::to_string(i) + ", " +
                         std::to_string(j) + ") out of range");
  }
  return i * cols() + j;
}

std::optional<double> CkaHeatmap::at(std::size_t i, std::size_t j) const {
  return values_[index(i, j)];
}

double CkaHeatmap::valueOrNan(std::size_t i, std::size_t j) const {
  return values_[index(i, j)].value_or(std::numeric_limits<double>::quiet_NaN());
}

bool CkaHeatmap::missing(std::size_t i, std::size_t j) const {
  return !values_[index(i, j)].has_value();
}

std::size_t CkaHeatmap::missingCount() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [](const auto& v) { return !v.has_value(); }));
}

void CkaHeatmap::set(std::size_t i, std::size_t j, double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgumentError("heatmap values must be finite; use setMissing");
  }
  values_[index(i, j)] = value;
}

void CkaHeatmap::setMissing(std::size_t i, std::size_t j) {
  values_[index(i, j)].reset();
}

}  // namespace repsim
