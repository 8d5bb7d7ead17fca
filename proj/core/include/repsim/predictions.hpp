#ifndef REPSIM_PREDICTIONS_HPP
#define REPSIM_PREDICTIONS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "repsim/probes.hpp"
#include "repsim/stats.hpp"

namespace repsim {

/// Predicted labels of a group of models on a shared, ordered example set.
class PredictionEnsemble {
 public:
  /// `predicted[k]` holds model k's labels, one per example. Throws
  /// InvalidArgumentError when a label is out of range or a row has the
  /// wrong length.
  PredictionEnsemble(std::string groupName, std::vector<Label> trueLabels,
                     std::size_t classCount,
                     std::vector<std::vector<Label>> predicted,
                     std::vector<std::string> modelNames = {});

  const std::string& groupName() const noexcept { return groupName_; }
  std::size_t modelCount() const noexcept { return predicted_.size(); }
  std::size_t exampleCount() const noexcept { return trueLabels_.size(); }
  std::size_t classCount() const noexcept { return classCount_; }
  std::span<const Label> trueLabels() const noexcept { return trueLabels_; }
  std::span<const Label> predicted(std::size_t model) const {
    return predicted_.at(model);
  }
  const std::vector<std::string>& modelNames() const noexcept { return modelNames_; }

  bool correct(std::size_t model, std::size_t example) const {
    return predicted_[model][example] == trueLabels_[example];
  }

 private:
  std::string groupName_;
  std::vector<Label> trueLabels_;
  std::size_t classCount_;
  std::vector<std::vector<Label>> predicted_;
  std::vector<std::string> modelNames_;
};

/// Models of `a` followed by models of `b`; requires identical true labels.
PredictionEnsemble concatenate(const PredictionEnsemble& a,
                               const PredictionEnsemble& b,
                               std::string groupName);

/// Fraction of models that classify each example correctly.
std::vector<double> perExampleAccuracy(const PredictionEnsemble& e);

/// Accuracy of each model over the examples whose true class is in
/// `classes` (all examples when empty).
std::vector<double> perModelAccuracy(const PredictionEnsemble& e,
                                     std::span<const Label> classes = {});

/// A named set of classes (e.g. a synset and its hyponyms).
struct ClassSet {
  std::string name;
  std::vector<Label> classes;
};

/// Per-model accuracies of two groups on one subset of examples, compared
/// with Welch's test. SEM is across models.
struct SubsetDifference {
  std::string name;
  std::vector<Label> classes;
  std::size_t exampleCount = 0;
  double share = 0.0;  ///< exampleCount / total examples
  double meanAccuracyA = 0.0;
  double meanAccuracyB = 0.0;
  double semA = 0.0;
  double semB = 0.0;
  double difference = 0.0;  ///< meanAccuracyA - meanAccuracyB
  WelchResult test;
  double adjustedP = 1.0;   ///< Holm-Sidak within its family
};

struct GroupComparison {
  std::string groupA;
  std::string groupB;
  std::vector<double> perExampleAccA;  ///< paired scatter, one per example
  std::vector<double> perExampleAccB;
  double overallAccuracyA = 0.0;  ///< mean over models
  double overallAccuracyB = 0.0;
  /// One entry per class that has examples, in class order. Classes without
  /// examples are skipped and listed in `emptyClasses`.
  std::vector<SubsetDifference> perClass;
  std::vector<Label> emptyClasses;
  /// One entry per requested class set, adjusted as a separate family.
  std::vector<SubsetDifference> perClassSet;

  std::size_t significantClasses(double alpha = 0.05) const;
};

/// Class-level comparison of two ensembles over the same examples. Each
/// group needs at least two models. Throws DegenerateInputError when a
/// requested class set covers no examples.
GroupComparison classLevelComparison(const PredictionEnsemble& a,
                                     const PredictionEnsemble& b,
                                     std::span<const ClassSet> classSets = {});

/// Logistic models of per-prediction correctness over the pooled ensembles
/// (group indicator g = 0 for `a`, 1 for `b`):
///   A: logit = alpha_example + beta * g
///   B: logit = alpha_example + beta_class(example) * g
///   C: logit = alpha_example + beta_example * g   (saturated per cell)
/// Each is nested in the next.
enum class FactorModel { kA, kB, kC };

std::string_view toString(FactorModel m) noexcept;

struct FactorFitConfig {
  double ridge = 1e-6;              ///< L2 on all coefficients
  double gradientTolerance = 1e-6;  ///< max-norm of the penalized gradient
  std::size_t maxIterations = 200;
};

struct FactorModelFit {
  FactorModel model = FactorModel::kA;
  double residualVariance = 0.0;  ///< sum (y - pi)^2 / n over predictions
  double logLikelihood = 0.0;     ///< unpenalized Bernoulli log-likelihood
  double deviance = 0.0;          ///< -2 logLikelihood
  double aic = 0.0;               ///< 2k - 2 logLikelihood
  std::size_t coefficientCount = 0;
  std::size_t observationCount = 0;
  std::size_t iterations = 0;
  double gradientNorm = 0.0;
  double ridge = 0.0;
  /// (example, group) cells whose outcomes are all 0 or all 1; their
  /// coefficients are held finite only by the ridge.
  std::size_t separatedCells = 0;
  /// Fitted probability per example for group a (index 0) and group b (1).
  std::vector<double> fittedA;
  std::vector<double> fittedB;
};

/// Fits by damped Newton steps; the Hessian has arrow structure (each
/// example coefficient couples to one shared coefficient), so every step is
/// solved exactly in linear time. Throws ConvergenceError if the gradient
/// tolerance is not met within the iteration budget.
FactorModelFit fitFactorModel(const PredictionEnsemble& a,
                              const PredictionEnsemble& b, FactorModel model,
                              const FactorFitConfig& config = {});

/// Efron-style v^2 = (Var_A - Var_B) / (Var_A - Var_C). Throws
/// InvalidArgumentError when the fits cover different observations or
/// out-of-order models, and DegenerateInputError when Var_A == Var_C.
double pseudoRSquared(const FactorModelFit& fitA, const FactorModelFit& fitB,
                      const FactorModelFit& fitC);

}  // namespace repsim

#endif  // REPSIM_PREDICTIONS_HPP
