#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace repsim::fixture {

Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.normal();
  return m;
}

Matrix randomOrthogonal(std::size_t n, Rng& rng) {
  Matrix q = gaussian(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += q(i, j) * q(i, k);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

Pair correlatedPair(std::size_t m, std::size_t px, std::size_t py, double noise,
                    std::uint64_t seed) {
  Rng rng(seed);
  Matrix x = gaussian(m, px, rng);
  const Matrix w = gaussian(px, py, rng);
  Matrix y = matmul(x, w);
  for (double& v : y.values()) v += noise * rng.normal();
  return {std::move(x), std::move(y)};
}

LayerSet sharedPcLayers(std::size_t layerCount, std::size_t examples,
                        std::size_t features, std::size_t blockStart,
                        std::size_t blockEnd, double amplitude, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(examples);
  double mu = 0.0;
  for (double& v : u) {
    v = rng.normal();
    mu += v;
  }
  mu /= static_cast<double>(examples);
  double ss = 0.0;
  for (double& v : u) {
    v -= mu;
    ss += v * v;
  }
  const double rms = std::sqrt(ss / static_cast<double>(examples));
  for (double& v : u) v /= rms;

  LayerSet set;
  for (std::size_t l = 0; l < layerCount; ++l) {
    Matrix x = gaussian(examples, features, rng);
    if (l >= blockStart && l <= blockEnd) {
      std::vector<double> w(features);
      double wn = 0.0;
      for (double& v : w) {
        v = rng.normal();
        wn += v * v;
      }
      wn = std::sqrt(wn);
      for (std::size_t i = 0; i < examples; ++i)
        for (std::size_t c = 0; c < features; ++c) x(i, c) += amplitude * u[i] * w[c] / wn;
    }
    set.add(Layer{"layer" + std::to_string(l), static_cast<std::uint8_t>(l / 4),
                  l % 2 == 0 ? LayerPosition::kPreResidual : LayerPosition::kPostResidual,
                  StorageType::kFloat64, std::move(x)});
  }
  return set;
}

CkaHeatmap plantedHeatmap(std::size_t n, std::size_t start, std::size_t end,
                          double inside, double outside) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("l" + std::to_string(i));
  CkaHeatmap h(names, names);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool in = i >= start && i <= end && j >= start && j <= end;
      h.set(i, j, i == j ? 1.0 : (in ? inside : outside));
    }
  return h;
}

PredictionEnsemble bernoulliEnsemble(const std::vector<Label>& trueLabels,
                                     std::size_t classCount, std::size_t models,
                                     double base, const std::vector<double>& boost,
                                     Rng& rng, const char* group) {
  std::vector<std::vector<Label>> predicted(models);
  for (auto& row : predicted) {
    row.resize(trueLabels.size());
    for (std::size_t i = 0; i < trueLabels.size(); ++i) {
      const Label y = trueLabels[i];
      const double p = std::clamp(base + (y < boost.size() ? boost[y] : 0.0), 0.0, 1.0);
      row[i] = rng.uniform() < p ? y : static_cast<Label>((y + 1) % classCount);
    }
  }
  return PredictionEnsemble(group, trueLabels, classCount, std::move(predicted));
}

std::vector<Label> balancedLabels(std::size_t classes, std::size_t perClass) {
  std::vector<Label> out;
  for (std::size_t k = 0; k < perClass; ++k)
    for (std::size_t c = 0; c < classes; ++c) out.push_back(static_cast<Label>(c));
  return out;
}

}  // namespace repsim::fixture
