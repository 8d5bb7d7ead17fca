#include "repsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "repsim/cka.hpp"
#include "repsim/error.hpp"

namespace repsim {

namespace {

double columnDot(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, ca) * b(i, cb);
  return s;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void requireVariance(const Matrix& x, const std::string& what) {
  if (!hasVariance(x)) {
    throw DegenerateInputError(what + ": activations have no variance across examples");
  }
}

}  // namespace

SpectralSummary summarize(const Matrix& x, std::string layerName,
                          std::optional<std::size_t> maxComponents) {
  requireVariance(x, layerName.empty() ? std::string("spectral summary")
                                       : "layer '" + layerName + "'");
  const SvdResult dec = svd(centerColumns(x));
  const std::size_t full = dec.singularValues.size();
  const std::size_t keep = std::min(full, maxComponents.value_or(full));
  if (keep == 0) throw InvalidArgumentError("summarize: need at least one component");

  SpectralSummary out;
  out.layerName = std::move(layerName);
  for (double s : dec.singularValues) out.totalVariance += s * s;
  out.varianceFractions.resize(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const double s = dec.singularValues[k];
    out.varianceFractions[k] = s * s / out.totalVariance;
  }
  out.components = Matrix(x.rows(), keep);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < keep; ++k) out.components(i, k) = dec.leftVectors(i, k);
  return out;
}

double ckaSpectral(const SpectralSummary& sx, const SpectralSummary& sy) {
  if (sx.exampleCount() != sy.exampleCount()) {
    throw DimensionError("ckaSpectral: summaries cover " +
                         std::to_string(sx.exampleCount()) + " and " +
                         std::to_string(sy.exampleCount()) + " examples");
  }
  double num = 0.0;
  for (std::size_t i = 0; i < sx.componentCount(); ++i) {
    const double fi = sx.varianceFractions[i];
    if (fi == 0.0) continue;
    for (std::size_t j = 0; j < sy.componentCount(); ++j) {
      const double gj = sy.varianceFractions[j];
      if (gj == 0.0) continue;
      const double c = columnDot(sx.components, i, sy.components, j);
      num += fi * gj * c * c;
    }
  }
  return num / (norm2(sx.varianceFractions) * norm2(sy.varianceFractions));
}

std::vector<double> varianceExplained(const Matrix& x, std::size_t topK) {
  if (topK == 0) throw InvalidArgumentError("varianceExplained: topK must be positive");
  return summarize(x, {}, topK).varianceFractions;
}

Matrix poolStages(const LayerSet& layers, std::span<const std::uint8_t> stages) {
  std::vector<Matrix> parts;
  for (const auto& l : layers) {
    if (std::find(stages.begin(), stages.end(), l.stage) != stages.end())
      parts.push_back(l.activations);
  }
  if (parts.empty()) throw InvalidArgumentError("poolStages: no layer has a requested stage tag");
  return concatColumns(parts);
}

CkaHeatmap firstPcCosineMap(const LayerSet& layers) {
  CkaHeatmap h(layers.names(), layers.names());
  std::vector<SpectralSummary> first;
  first.reserve(layers.size());
  for (const auto& l : layers) first.push_back(summarize(l.activations, l.name, 1));
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t j = i; j < layers.size(); ++j) {
      const double c = columnDot(first[i].components, 0, first[j].components, 0);
      h.set(i, j, c * c);
      h.set(j, i, c * c);
    }
  }
  return h;
}

Matrix removeFirstPc(const Matrix& x) {
  requireVariance(x, "removeFirstPc");
  Matrix centered = centerColumns(x);
  const SvdResult dec = svd(centered);
  const std::vector<double> u = column(dec.leftVectors, 0);
  std::vector<double> w(x.cols(), 0.0);  // u^T X_centered
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = centered.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) w[j] += u[i] * r[j];
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = centered.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) r[j] -= u[i] * w[j];
  }
  return centered;
}

LayerSet removeFirstPc(const LayerSet& layers) {
  LayerSet out;
  for (const auto& l : layers) {
    Layer copy{l.name, l.stage, l.position, StorageType::kFloat64,
               removeFirstPc(l.activations)};
    out.add(std::move(copy));
  }
  return out;
}

ReluSparsity reluSparsity(const Matrix& x) {
  ReluSparsity out;
  std::size_t nonzero = 0;
  std::size_t alwaysZero = 0;
  std::size_t alwaysNonzero = 0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::size_t active = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (v != 0.0) ++active;
      if (v < 0.0) ++out.negativeCount;
    }
    nonzero += active;
    if (active == 0) ++alwaysZero;
    if (active == x.rows()) ++alwaysNonzero;
  }
  out.fractionNonzero = static_cast<double>(nonzero) / static_cast<double>(x.size());
  out.fractionAlwaysZero = static_cast<double>(alwaysZero) / static_cast<double>(x.cols());
  out.fractionAlwaysNonzero =
      static_cast<double>(alwaysNonzero) / static_cast<double>(x.cols());
  return out;
}

}  // namespace repsim
