#include "repsim/probes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "repsim/error.hpp"
#include "repsim/rng.hpp"

namespace repsim {

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  Matrix apply(const Matrix& x) const {
    Matrix out = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto r = out.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) r[j] = (r[j] - mean[j]) / scale[j];
    }
    return out;
  }
};

Standardizer fitStandardizer(const Matrix& x, bool enabled) {
  Standardizer s{std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 1.0)};
  if (!enabled) return s;
  const double m = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) sum += x(i, j);
    const double mu = sum / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, j) - mu) * (x(i, j) - mu);
    const double sd = std::sqrt(ss / m);
    s.mean[j] = mu;
    // Constant features stay at zero after centering.
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

// Softmax-regression objective on standardized features.
class SoftmaxObjective {
 public:
  SoftmaxObjective(const Matrix& z, std::span<const Label> y, std::size_t classes, double l2)
      : z_(z), y_(y), classes_(classes), l2_(l2) {}

  // Returns the loss; fills gradients when requested.
  double evaluate(const Matrix& w, std::span<const double> b, Matrix* gw,
                  std::vector<double>* gb) const {
    const std::size_t m = z_.rows();
    const std::size_t p = z_.cols();
    const std::size_t c = classes_;
    std::vector<double> logits(c);
    double loss = 0.0;
    if (gw) {
      *gw = Matrix(p, c);
      gb->assign(c, 0.0);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto zi = z_.row(i);
      for (std::size_t k = 0; k < c; ++k) logits[k] = b[k];
      for (std::size_t j = 0; j < p; ++j) {
        const double v = zi[j];
        if (v == 0.0) continue;
        const auto wj = w.row(j);
        for (std::size_t k = 0; k < c; ++k) logits[k] += v * wj[k];
      }
      const double top = *std::max_element(logits.begin(), logits.end());
      double norm = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        logits[k] = std::exp(logits[k] - top);
        norm += logits[k];
      }
      loss += std::log(norm) - std::log(logits[y_[i]]);
      if (!gw) continue;
      for (std::size_t k = 0; k < c; ++k) {
        logits[k] /= norm;  // now the softmax probability
        if (k == y_[i]) logits[k] -= 1.0;
        (*gb)[k] += logits[k];
      }
      for (std::size_t j = 0; j < p; ++j) {
        const double v = zi[j];
        if (v == 0.0) continue;
        auto gj = gw->row(j);
        for (std::size_t k = 0; k < c; ++k) gj[k] += v * logits[k];
      }
    }
    const double inv = 1.0 / static_cast<double>(m);
    double penalty = 0.0;
    for (double v : w.values()) penalty += v * v;
    if (gw) {
      auto gv = gw->values();
      const auto wv = w.values();
      for (std::size_t t = 0; t < gv.size(); ++t) gv[t] = gv[t] * inv + l2_ * wv[t];
      for (double& g : *gb) g *= inv;
    }
    return loss * inv + 0.5 * l2_ * penalty;
  }

 private:
  const Matrix& z_;
  std::span<const Label> y_;
  std::size_t classes_;
  double l2_;
};

double accuracy(const Matrix& z, std::span<const Label> y, const Matrix& w,
                std::span<const double> b) {
  const std::size_t c = b.size();
  std::vector<double> logits(c);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t k = 0; k < c; ++k) logits[k] = b[k];
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double v = z(i, j);
      for (std::size_t k = 0; k < c; ++k) logits[k] += v * w(j, k);
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(z.rows());
}

}  // namespace

ProbeResult trainProbe(const Matrix& xTrain, std::span<const Label> yTrain,
                       const Matrix& xTest, std::span<const Label> yTest,
                       const ProbeConfig& config) {
  if (xTrain.rows() != yTrain.size() || xTest.rows() != yTest.size()) {
    throw DimensionError("trainProbe: feature rows and label counts differ");
  }
  if (xTrain.cols() != xTest.cols()) {
    throw DimensionError("trainProbe: train and test feature widths differ");
  }
  if (!allFinite(xTrain.values()) || !allFinite(xTest.values())) {
    throw InvalidArgumentError("trainProbe: activations contain non-finite values");
  }
  if (config.iterations == 0 || !(config.stepSize > 0.0) || config.l2 < 0.0) {
    throw InvalidArgumentError("trainProbe: invalid optimizer settings");
  }
  const std::set<Label> seen(yTrain.begin(), yTrain.end());
  if (seen.size() < 2) {
    throw DegenerateInputError("trainProbe: training labels contain a single class");
  }
  Label maxLabel = *seen.rbegin();
  for (Label l : yTest) maxLabel = std::max(maxLabel, l);
  const std::size_t classes = static_cast<std::size_t>(maxLabel) + 1;
  const std::size_t p = xTrain.cols();

  const Standardizer standardizer = fitStandardizer(xTrain, config.standardize);
  const Matrix zTrain = standardizer.apply(xTrain);
  const Matrix zTest = standardizer.apply(xTest);

  Rng rng(config.seed);
  Matrix w(p, classes);
  for (double& v : w.values()) v = config.initScale * rng.normal();
  std::vector<double> b(classes, 0.0);

  const SoftmaxObjective objective(zTrain, yTrain, classes, config.l2);
  ProbeResult result;
  result.lossHistory.reserve(config.iterations + 1);

  Matrix gw(p, classes);
  std::vector<double> gb;
  double step = config.stepSize;
  double loss = objective.evaluate(w, b, &gw, &gb);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    result.lossHistory.push_back(loss);
    bool accepted = false;
    for (int halvings = 0; halvings < 40 && !accepted; ++halvings) {
      Matrix wNext = w;
      std::vector<double> bNext = b;
      auto wn = wNext.values();
      const auto gv = gw.values();
      for (std::size_t t = 0; t < wn.size(); ++t) wn[t] -= step * gv[t];
      for (std::size_t k = 0; k < classes; ++k) bNext[k] -= step * gb[k];
      const double trial = objective.evaluate(wNext, bNext, nullptr, nullptr);
      if (trial <= loss) {
        w = std::move(wNext);
        b = std::move(bNext);
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;  // stationary to working precision
    loss = objective.evaluate(w, b, &gw, &gb);
  }
  result.lossHistory.push_back(loss);

  result.trainAccuracy = accuracy(zTrain, yTrain, w, b);
  result.testAccuracy = accuracy(zTest, yTest, w, b);

  // Fold the standardization into the reported coefficients.
  result.weights = Matrix(p, classes);
  result.bias = b;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < classes; ++k) {
      const double coef = w(j, k) / standardizer.scale[j];
      result.weights(j, k) = coef;
      result.bias[k] -= standardizer.mean[j] * coef;
    }
  }
  return result;
}

TrainTestSplit splitExamples(std::size_t exampleCount, double trainFraction,
                             std::uint64_t seed) {
  if (exampleCount < 2) throw DimensionError("splitExamples: need at least 2 examples");
  if (!(trainFraction > 0.0 && trainFraction < 1.0)) {
    throw InvalidArgumentError("splitExamples: train fraction must be in (0, 1)");
  }
  auto nTrain = static_cast<std::size_t>(
      std::llround(trainFraction * static_cast<double>(exampleCount)));
  nTrain = std::clamp<std::size_t>(nTrain, 1, exampleCount - 1);
  Rng rng(seed);
  const auto order = permutation(exampleCount, rng);
  TrainTestSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nTrain));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(nTrain), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<ProbeResult> probeCurve(const LayerSet& layers, std::span<const Label> labels,
                                    const ProbeConfig& config) {
  if (layers.empty()) return {};
  if (labels.size() != layers.exampleCount()) {
    throw DimensionError("probeCurve: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(layers.exampleCount()) +
                         " examples");
  }
  const TrainTestSplit split = splitExamples(labels.size(), config.trainFraction,
                                             config.splitSeed);
  std::vector<Label> yTrain;
  std::vector<Label> yTest;
  for (auto i : split.train) yTrain.push_back(labels[i]);
  for (auto i : split.test) yTest.push_back(labels[i]);

  std::vector<ProbeResult> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) {
    ProbeResult r = trainProbe(gatherRows(layer.activations, split.train), yTrain,
                               gatherRows(layer.activations, split.test), yTest, config);
    r.layerName = layer.name;
    r.position = layer.position;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace repsim
