#include "repsim/cka.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "repsim/error.hpp"
#include "repsim/gram.hpp"
#include "repsim/rng.hpp"

namespace repsim {

namespace {

// Relative size of the centered sum of squares below which a matrix counts
// as constant. Rounding in the column means contributes ~1e-32.
constexpr double kVarianceFloor = 1e-24;

std::size_t minExamples(Estimator e) { return e == Estimator::kBiased ? 2 : 4; }

double normalizedRatio(double cross, double selfX, double selfY) {
  if (!(selfX > 0.0) || !(selfY > 0.0)) {
    throw DegenerateInputError("CKA undefined: self-similarity is not positive");
  }
  return cross / std::sqrt(selfX * selfY);
}

// Per-layer quantities reused across every heatmap entry the layer touches.
struct PreparedLayer {
  std::optional<GramMatrix> gram;  // centered (biased) or raw (unbiased)
  double self = 0.0;
};

PreparedLayer prepareFull(const Matrix& x, Estimator estimator) {
  PreparedLayer p;
  if (estimator == Estimator::kBiased) {
    p.gram = center(gram(x));
    p.self = hsic0Centered(*p.gram, *p.gram);
  } else {
    p.gram = gram(x);
    p.self = hsic1(*p.gram, *p.gram);
  }
  return p;
}

double crossTerm(const PreparedLayer& a, const PreparedLayer& b, Estimator estimator) {
  return estimator == Estimator::kBiased ? hsic0Centered(*a.gram, *b.gram)
                                         : hsic1(*a.gram, *b.gram);
}

void validateMinibatch(std::size_t m, const MinibatchConfig& config) {
  if (config.batchSize < 4) {
    throw InvalidArgumentError("minibatch CKA: batch size must be at least 4, got " +
                               std::to_string(config.batchSize));
  }
  if (config.epochs == 0) {
    throw InvalidArgumentError("minibatch CKA: epochs must be at least 1");
  }
  if (m < config.batchSize) {
    throw DimensionError("minibatch CKA: " + std::to_string(m) +
                         " examples is fewer than batch size " +
                         std::to_string(config.batchSize));
  }
}

std::vector<bool> usableLayers(const LayerSet& layers, CkaHeatmap& h, bool rows) {
  std::vector<bool> ok(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    ok[i] = hasVariance(layers[i].activations);
    if (!ok[i]) {
      h.addDiagnostic("layer '" + layers[i].name + "' (" + (rows ? "row " : "column ") +
                      std::to_string(i) + ") has no variance; its entries are missing");
    }
  }
  return ok;
}

void requireAligned(const LayerSet& a, const LayerSet& b) {
  if (!a.empty() && !b.empty() && a.exampleCount() != b.exampleCount()) {
    throw DimensionError("heatmap: layer sets index different example counts (" +
                         std::to_string(a.exampleCount()) + " vs " +
                         std::to_string(b.exampleCount()) + ")");
  }
}

CkaHeatmap fullHeatmap(const LayerSet& a, const LayerSet* b, Estimator estimator) {
  const LayerSet& cols = b ? *b : a;
  CkaHeatmap h(a.names(), cols.names());
  const auto rowOk = usableLayers(a, h, true);
  const auto colOk = b ? usableLayers(*b, h, false) : rowOk;
  const std::size_t need = minExamples(estimator);
  if (!a.empty() && a.exampleCount() < need) {
    throw DimensionError("CKA needs at least " + std::to_string(need) + " examples");
  }

  std::vector<std::optional<PreparedLayer>> rowPrep(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (rowOk[i]) rowPrep[i] = prepareFull(a[i].activations, estimator);
  std::vector<std::optional<PreparedLayer>> colStore;
  if (b) {
    colStore.resize(b->size());
    for (std::size_t j = 0; j < b->size(); ++j)
      if (colOk[j]) colStore[j] = prepareFull((*b)[j].activations, estimator);
  }
  const auto& colPrep = b ? colStore : rowPrep;

  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = b ? 0 : i; j < h.cols(); ++j) {
      if (!rowPrep[i] || !colPrep[j]) continue;
      try {
        const double v = normalizedRatio(crossTerm(*rowPrep[i], *colPrep[j], estimator),
                                         rowPrep[i]->self, colPrep[j]->self);
        h.set(i, j, v);
        if (!b) h.set(j, i, v);
      } catch (const DegenerateInputError& e) {
        h.addDiagnostic("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        "): " + e.what());
      }
    }
  }
  return h;
}

CkaHeatmap minibatchHeatmap(const LayerSet& a, const LayerSet* b,
                            const MinibatchConfig& config) {
  const LayerSet& cols = b ? *b : a;
  CkaHeatmap h(a.names(), cols.names());
  if (a.empty() || cols.empty()) return h;
  const std::size_t m = a.exampleCount();
  validateMinibatch(m, config);
  const auto rowOk = usableLayers(a, h, true);
  const auto colOk = b ? usableLayers(*b, h, false) : rowOk;

  const std::size_t rowsN = a.size();
  const std::size_t colsN = cols.size();
  std::vector<ExactSum> rowSelf(rowsN);
  std::vector<ExactSum> colSelfStore(b ? colsN : 0);
  std::vector<ExactSum>& colSelf = b ? colSelfStore : rowSelf;
  std::vector<ExactSum> cross(rowsN * colsN);

  std::vector<std::optional<GramMatrix>> rowGram(rowsN);
  std::vector<std::optional<GramMatrix>> colGramStore(b ? colsN : 0);
  auto& colGram = b ? colGramStore : rowGram;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : epochBatches(m, config.batchSize, config.seed, epoch)) {
      for (std::size_t i = 0; i < rowsN; ++i) {
        if (!rowOk[i]) continue;
        rowGram[i] = gram(gatherRows(a[i].activations, batch));
        rowSelf[i].add(hsic1(*rowGram[i], *rowGram[i]));
      }
      if (b) {
        for (std::size_t j = 0; j < colsN; ++j) {
          if (!colOk[j]) continue;
          colGram[j] = gram(gatherRows((*b)[j].activations, batch));
          colSelf[j].add(hsic1(*colGram[j], *colGram[j]));
        }
      }
      for (std::size_t i = 0; i < rowsN; ++i) {
        if (!rowOk[i]) continue;
        for (std::size_t j = b ? 0 : i; j < colsN; ++j) {
          if (!colOk[j]) continue;
          cross[i * colsN + j].add(hsic1(*rowGram[i], *colGram[j]));
        }
      }
    }
  }

  for (std::size_t i = 0; i < rowsN; ++i) {
    for (std::size_t j = b ? 0 : i; j < colsN; ++j) {
      if (!rowOk[i] || !colOk[j]) continue;
      try {
        const double v = normalizedRatio(cross[i * colsN + j].value(),
                                         rowSelf[i].value(), colSelf[j].value());
        h.set(i, j, v);
        if (!b) h.set(j, i, v);
      } catch (const DegenerateInputError& e) {
        h.addDiagnostic("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        "): " + e.what());
      }
    }
  }
  return h;
}

}  // namespace

bool hasVariance(const Matrix& x) {
  const Matrix centered = centerColumns(x);
  double centeredSs = 0.0;
  double rawSs = 0.0;
  for (double v : centered.values()) centeredSs += v * v;
  for (double v : x.values()) rawSs += v * v;
  return centeredSs > 0.0 && centeredSs > kVarianceFloor * rawSs;
}

double ckaFull(const Matrix& x, const Matrix& y, Estimator estimator) {
  if (x.rows() != y.rows()) {
    throw DimensionError("CKA: example counts differ (" + std::to_string(x.rows()) +
                         " vs " + std::to_string(y.rows()) + ")");
  }
  const std::size_t need = minExamples(estimator);
  if (x.rows() < need) {
    throw DimensionError("CKA: needs at least " + std::to_string(need) +
                         " examples, got " + std::to_string(x.rows()));
  }
  if (!hasVariance(x) || !hasVariance(y)) {
    throw DegenerateInputError("CKA undefined: a representation is constant across examples");
  }
  const PreparedLayer px = prepareFull(x, estimator);
  const PreparedLayer py = prepareFull(y, estimator);
  return normalizedRatio(crossTerm(px, py, estimator), px.self, py.self);
}

Matrix MatrixSource::gather(std::span<const std::size_t> indices) const {
  return gatherRows(m_, indices);
}

void MinibatchAccumulator::add(double cross, double selfX, double selfY) {
  cross_.add(cross);
  selfX_.add(selfX);
  selfY_.add(selfY);
  ++batches_;
}

void MinibatchAccumulator::merge(const MinibatchAccumulator& other) noexcept {
  cross_.merge(other.cross_);
  selfX_.merge(other.selfX_);
  selfY_.merge(other.selfY_);
  batches_ += other.batches_;
}

double MinibatchAccumulator::finalize() const {
  if (batches_ == 0) {
    throw DegenerateInputError("minibatch CKA: no batches accumulated");
  }
  return normalizedRatio(cross_.value(), selfX_.value(), selfY_.value());
}

std::vector<std::vector<std::size_t>> epochBatches(std::size_t exampleCount,
                                                   std::size_t batchSize,
                                                   std::uint64_t seed,
                                                   std::size_t epoch) {
  if (batchSize == 0) throw InvalidArgumentError("batch size must be positive");
  Rng rng(seed, epoch);
  const auto order = permutation(exampleCount, rng);
  const std::size_t batchCount = exampleCount / batchSize;
  std::vector<std::vector<std::size_t>> batches(batchCount);
  for (std::size_t b = 0; b < batchCount; ++b) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(b * batchSize);
    batches[b].assign(first, first + static_cast<std::ptrdiff_t>(batchSize));
    std::sort(batches[b].begin(), batches[b].end());
  }
  return batches;
}

MinibatchAccumulator accumulateMinibatches(const ActivationSource& x,
                                           const ActivationSource& y,
                                           const MinibatchConfig& config) {
  const std::size_t m = x.exampleCount();
  if (y.exampleCount() != m) {
    throw DimensionError("minibatch CKA: example counts differ (" + std::to_string(m) +
                         " vs " + std::to_string(y.exampleCount()) + ")");
  }
  validateMinibatch(m, config);
  MinibatchAccumulator acc;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : epochBatches(m, config.batchSize, config.seed, epoch)) {
      const GramMatrix k = gram(x.gather(batch));
      const GramMatrix l = gram(y.gather(batch));
      acc.add(hsic1(k, l), hsic1(k, k), hsic1(l, l));
    }
  }
  return acc;
}

double ckaMinibatch(const ActivationSource& x, const ActivationSource& y,
                    const MinibatchConfig& config) {
  return accumulateMinibatches(x, y, config).finalize();
}

double ckaMinibatch(const Matrix& x, const Matrix& y, const MinibatchConfig& config) {
  if (!hasVariance(x) || !hasVariance(y)) {
    throw DegenerateInputError("CKA undefined: a representation is constant across examples");
  }
  return ckaMinibatch(MatrixSource(x), MatrixSource(y), config);
}

CkaHeatmap heatmap(const LayerSet& layers, const HeatmapConfig& config) {
  return config.mode == HeatmapMode::kFull
             ? fullHeatmap(layers, nullptr, config.estimator)
             : minibatchHeatmap(layers, nullptr, config.minibatch);
}

CkaHeatmap heatmap(const LayerSet& a, const LayerSet& b, const HeatmapConfig& config) {
  requireAligned(a, b);
  return config.mode == HeatmapMode::kFull ? fullHeatmap(a, &b, config.estimator)
                                           : minibatchHeatmap(a, &b, config.minibatch);
}

}  // namespace repsim
