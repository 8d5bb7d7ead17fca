#ifndef REPSIM_SPECTRAL_HPP
#define REPSIM_SPECTRAL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repsim/heatmap.hpp"
#include "repsim/layer.hpp"
#include "repsim/matrix.hpp"

namespace repsim {

/// Principal components of one layer in example space.
///
/// `components` holds left singular vectors of the column-centered activations
/// (m x r, unit-norm columns), so components of layers with different widths
/// are directly comparable. Variance fractions are squared singular values
/// over their sum.
struct SpectralSummary {
  std::string layerName;
  double totalVariance = 0.0;  ///< sum of squared singular values
  std::vector<double> varianceFractions;
  Matrix components{1, 1};

  std::size_t exampleCount() const noexcept { return components.rows(); }
  std::size_t componentCount() const noexcept { return varianceFractions.size(); }
};

/// Centers `x` and decomposes it. Keeps the full spectrum unless
/// `maxComponents` is given. Throws DegenerateInputError when x has no
/// variance.
SpectralSummary summarize(const Matrix& x, std::string layerName = {},
                          std::optional<std::size_t> maxComponents = std::nullopt);

/// Linear CKA from spectra:
///   sum_ij f_i g_j <u_i, v_j>^2 / (||f|| ||g||)
/// where f, g are the variance fractions. The form is scale-free, so the
/// fractions stand in for the squared singular values. Exact only when both
/// summaries keep the full spectrum.
double ckaSpectral(const SpectralSummary& sx, const SpectralSummary& sy);

/// Fractions of variance explained by the top `topK` principal components
/// (fewer when the rank bound min(m, p) is smaller).
std::vector<double> varianceExplained(const Matrix& x, std::size_t topK);

/// Concatenates, along the feature axis, every layer whose stage tag is in
/// `stages`. Throws InvalidArgumentError if none match.
Matrix poolStages(const LayerSet& layers, std::span<const std::uint8_t> stages);

/// Squared cosine between the first principal components of every layer
/// pair. Symmetric with unit diagonal; sign conventions cannot leak in.
CkaHeatmap firstPcCosineMap(const LayerSet& layers);

/// Column-centers `x` and subtracts its rank-1 projection onto the first
/// principal component. Means are not added back.
Matrix removeFirstPc(const Matrix& x);

/// removeFirstPc on every layer; metadata is kept and storage becomes f64.
LayerSet removeFirstPc(const LayerSet& layers);

struct ReluSparsity {
  double fractionNonzero = 0.0;        ///< over all entries
  double fractionAlwaysZero = 0.0;     ///< units never active
  double fractionAlwaysNonzero = 0.0;  ///< units active on every example
  std::size_t negativeCount = 0;       ///< > 0 means input is not post-ReLU

  bool looksPostRelu() const noexcept { return negativeCount == 0; }
};

/// Negative entries are counted, not rejected; callers decide whether to warn.
ReluSparsity reluSparsity(const Matrix& x);

}  // namespace repsim

#endif  // REPSIM_SPECTRAL_HPP
