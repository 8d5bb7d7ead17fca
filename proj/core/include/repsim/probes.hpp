#ifndef REPSIM_PROBES_HPP
#define REPSIM_PROBES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "repsim/layer.hpp"
#include "repsim/matrix.hpp"

namespace repsim {

using Label = std::uint32_t;

struct ProbeConfig {
  double l2 = 1e-4;         ///< penalty (l2/2)||W||^2, bias unpenalized
  double stepSize = 0.1;    ///< initial step; halved whenever a step raises the loss
  std::size_t iterations = 500;
  std::uint64_t seed = 0;   ///< weight initialization
  double initScale = 0.01;  ///< std-dev of initial weights
  bool standardize = true;  ///< z-score features with train statistics
  double trainFraction = 0.8;
  std::uint64_t splitSeed = 0;
};

struct ProbeResult {
  std::string layerName;
  LayerPosition position = LayerPosition::kOther;
  double trainAccuracy = 0.0;
  double testAccuracy = 0.0;
  Matrix weights{1, 1};       ///< p x C, in original feature units
  std::vector<double> bias;   ///< length C, in original feature units
  std::vector<double> lossHistory;  ///< training objective per iteration
};

/// Softmax regression probe fitted by deterministic full-batch gradient
/// descent on mean cross-entropy plus L2 penalty.
///
/// The class count is 1 + the largest label seen. Throws DimensionError on
/// size mismatches, DegenerateInputError when the training labels contain
/// a single class and InvalidArgumentError on non-finite features.
ProbeResult trainProbe(const Matrix& xTrain, std::span<const Label> yTrain,
                       const Matrix& xTest, std::span<const Label> yTest,
                       const ProbeConfig& config = {});

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle split; the train part has round(fraction * m) examples,
/// and both parts are non-empty.
TrainTestSplit splitExamples(std::size_t exampleCount, double trainFraction,
                             std::uint64_t seed);

/// One probe per layer, in layer order, sharing a single train/test split.
std::vector<ProbeResult> probeCurve(const LayerSet& layers,
                                    std::span<const Label> labels,
                                    const ProbeConfig& config = {});

}  // namespace repsim

#endif  // REPSIM_PROBES_HPP
