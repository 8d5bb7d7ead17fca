#ifndef REPSIM_CKA_HPP
#define REPSIM_CKA_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "repsim/exact_sum.hpp"
#include "repsim/heatmap.hpp"
#include "repsim/layer.hpp"
#include "repsim/matrix.hpp"

namespace repsim {

enum class Estimator { kBiased, kUnbiased };

/// Linear CKA on the full example set:
/// HSIC(K, L) / sqrt(HSIC(K, K) HSIC(L, L)) with the chosen HSIC estimator.
///
/// Throws DimensionError when the row counts differ or are too small for the
/// estimator (2 biased, 4 unbiased) and DegenerateInputError when either
/// representation has no variance across examples.
double ckaFull(const Matrix& x, const Matrix& y, Estimator estimator);

/// True when some column of `x` varies across rows by more than rounding
/// noise relative to its magnitude.
bool hasVariance(const Matrix& x);

/// Row-addressable activations. Lets minibatch CKA pull one batch at a time
/// from storage that need not hold the full matrix in memory.
class ActivationSource {
 public:
  virtual ~ActivationSource() = default;
  virtual std::size_t exampleCount() const = 0;
  virtual Matrix gather(std::span<const std::size_t> indices) const = 0;
};

/// ActivationSource over an in-memory matrix. Holds a reference.
class MatrixSource final : public ActivationSource {
 public:
  explicit MatrixSource(const Matrix& m) noexcept : m_(m) {}
  std::size_t exampleCount() const override { return m_.rows(); }
  Matrix gather(std::span<const std::size_t> indices) const override;

 private:
  const Matrix& m_;
};

/// Running sums of the three per-batch HSIC_1 terms of minibatch CKA.
///
/// Sums are exact (see ExactSum), so splitting a batch sequence across
/// accumulators and merging gives a bit-identical result to accumulating
/// sequentially, regardless of merge order.
class MinibatchAccumulator {
 public:
  void add(double cross, double selfX, double selfY);
  void merge(const MinibatchAccumulator& other) noexcept;

  double sumCross() const noexcept { return cross_.value(); }
  double sumSelfX() const noexcept { return selfX_.value(); }
  double sumSelfY() const noexcept { return selfY_.value(); }
  std::size_t batchCount() const noexcept { return batches_; }

  /// sumCross / sqrt(sumSelfX * sumSelfY); the 1/k factors cancel.
  /// Throws DegenerateInputError with no batches or non-positive self terms.
  double finalize() const;

  friend bool operator==(const MinibatchAccumulator&,
                         const MinibatchAccumulator&) = default;

 private:
  ExactSum cross_;
  ExactSum selfX_;
  ExactSum selfY_;
  std::size_t batches_ = 0;
};

struct MinibatchConfig {
  std::size_t batchSize = 256;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
};

/// Minibatches of one epoch: a shuffle of 0..m-1 drawn from stream `epoch`
/// of the generator keyed by `seed`, cut into floor(m / batchSize) batches.
/// Leftover examples are dropped. Indices inside a batch are sorted, which
/// does not change any HSIC value and keeps gathers sequential.
std::vector<std::vector<std::size_t>> epochBatches(std::size_t exampleCount,
                                                   std::size_t batchSize,
                                                   std::uint64_t seed,
                                                   std::size_t epoch);

/// Accumulates HSIC_1 terms over every batch of every epoch.
MinibatchAccumulator accumulateMinibatches(const ActivationSource& x,
                                           const ActivationSource& y,
                                           const MinibatchConfig& config);

/// Minibatch CKA: ratio of per-batch HSIC_1 averages. Deterministic in
/// (seed, batchSize, epochs). With batchSize == m and one epoch this is
/// bit-identical to ckaFull(x, y, kUnbiased).
double ckaMinibatch(const ActivationSource& x, const ActivationSource& y,
                    const MinibatchConfig& config);
double ckaMinibatch(const Matrix& x, const Matrix& y,
                    const MinibatchConfig& config);

enum class HeatmapMode { kFull, kMinibatch };

struct HeatmapConfig {
  HeatmapMode mode = HeatmapMode::kMinibatch;
  Estimator estimator = Estimator::kUnbiased;  ///< full mode only
  MinibatchConfig minibatch;
};

/// CKA between every pair of layers of one model. Only the upper triangle is
/// computed; the lower triangle mirrors it. A degenerate layer leaves its row
/// and column missing.
CkaHeatmap heatmap(const LayerSet& layers, const HeatmapConfig& config);

/// CKA between every layer of `a` (rows) and every layer of `b` (columns).
CkaHeatmap heatmap(const LayerSet& a, const LayerSet& b,
                   const HeatmapConfig& config);

}  // namespace repsim

#endif  // REPSIM_CKA_HPP
