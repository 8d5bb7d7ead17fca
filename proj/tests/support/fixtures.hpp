// Synthetic data shared by unit and acceptance tests.
#ifndef REPSIM_TESTS_FIXTURES_HPP
#define REPSIM_TESTS_FIXTURES_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "repsim/heatmap.hpp"
#include "repsim/layer.hpp"
#include "repsim/matrix.hpp"
#include "repsim/predictions.hpp"
#include "repsim/rng.hpp"

namespace repsim::fixture {

Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0);

/// Haar-ish random orthogonal matrix: Gram-Schmidt (twice) on a Gaussian.
Matrix randomOrthogonal(std::size_t n, Rng& rng);

/// Y = X W + noise * N for a shared Gaussian X; returns {X, Y}.
struct Pair {
  Matrix x;
  Matrix y;
};
Pair correlatedPair(std::size_t m, std::size_t px, std::size_t py, double noise,
                    std::uint64_t seed);

/// Layers 0..layerCount-1. Layers in [blockStart, blockEnd] get
/// `amplitude * u w_l^T` on top of unit Gaussian noise, with u a unit-RMS
/// direction in example space shared by the whole block and w_l a random
/// unit feature direction per layer. Other layers are pure noise.
LayerSet sharedPcLayers(std::size_t layerCount, std::size_t examples,
                        std::size_t features, std::size_t blockStart,
                        std::size_t blockEnd, double amplitude, std::uint64_t seed);

/// Square heatmap with `inside` on the [start, end] square, `outside`
/// elsewhere and 1 on the diagonal.
CkaHeatmap plantedHeatmap(std::size_t n, std::size_t start, std::size_t end,
                          double inside, double outside);

/// Ensemble of `models` models whose per-prediction accuracy is
/// base + boost[class] (clamped), drawn independently.
PredictionEnsemble bernoulliEnsemble(const std::vector<Label>& trueLabels,
                                     std::size_t classCount, std::size_t models,
                                     double base, const std::vector<double>& boost,
                                     Rng& rng, const char* group);

/// Labels 0..classes-1 repeated `perClass` times.
std::vector<Label> balancedLabels(std::size_t classes, std::size_t perClass);

}  // namespace repsim::fixture

#endif  // REPSIM_TESTS_FIXTURES_HPP
