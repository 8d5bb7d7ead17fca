#include "repsim/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "repsim/error.hpp"

namespace repsim {

PredictionEnsemble::PredictionEnsemble(std::string groupName, std::vector<Label> trueLabels,
                                       std::size_t classCount,
                                       std::vector<std::vector<Label>> predicted,
                                       std::vector<std::string> modelNames)
    : groupName_(std::move(groupName)),
      trueLabels_(std::move(trueLabels)),
      classCount_(classCount),
      predicted_(std::move(predicted)),
      modelNames_(std::move(modelNames)) {
  if (classCount_ == 0) throw InvalidArgumentError("ensemble: class count must be positive");
  if (trueLabels_.empty()) throw InvalidArgumentError("ensemble: no examples");
  if (predicted_.empty()) throw InvalidArgumentError("ensemble: no models");
  for (Label l : trueLabels_) {
    if (l >= classCount_) throw InvalidArgumentError("ensemble: true label out of range");
  }
  for (const auto& row : predicted_) {
    if (row.size() != trueLabels_.size()) {
      throw InvalidArgumentError("ensemble: a model covers " + std::to_string(row.size()) +
                                 " examples, expected " + std::to_string(trueLabels_.size()));
    }
    for (Label l : row) {
      if (l >= classCount_) throw InvalidArgumentError("ensemble: predicted label out of range");
    }
  }
  if (modelNames_.empty()) {
    for (std::size_t k = 0; k < predicted_.size(); ++k)
      modelNames_.push_back(groupName_ + "/" + std::to_string(k));
  }
  if (modelNames_.size() != predicted_.size()) {
    throw InvalidArgumentError("ensemble: model name count differs from model count");
  }
  if (std::set<std::string>(modelNames_.begin(), modelNames_.end()).size() != modelNames_.size()) {
    throw InvalidArgumentError("ensemble: model names must be unique");
  }
}

namespace {

void requireSameExamples(const PredictionEnsemble& a, const PredictionEnsemble& b) {
  if (a.classCount() != b.classCount() ||
      !std::equal(a.trueLabels().begin(), a.trueLabels().end(), b.trueLabels().begin(),
                  b.trueLabels().end())) {
    throw InvalidArgumentError("ensembles '" + a.groupName() + "' and '" + b.groupName() +
                               "' do not share examples and labels");
  }
}

// correct[k][c] and examples-per-class for one ensemble.
struct ClassTally {
  std::vector<std::vector<std::size_t>> correct;
  std::vector<std::size_t> examples;
};

ClassTally tally(const PredictionEnsemble& e) {
  ClassTally t;
  t.examples.assign(e.classCount(), 0);
  for (Label l : e.trueLabels()) ++t.examples[l];
  t.correct.assign(e.modelCount(), std::vector<std::size_t>(e.classCount(), 0));
  for (std::size_t k = 0; k < e.modelCount(); ++k)
    for (std::size_t i = 0; i < e.exampleCount(); ++i)
      if (e.correct(k, i)) ++t.correct[k][e.trueLabels()[i]];
  return t;
}

std::vector<double> subsetAccuracies(const ClassTally& t, std::span<const Label> classes,
                                     std::size_t& exampleCount) {
  exampleCount = 0;
  for (Label c : classes) exampleCount += t.examples[c];
  std::vector<double> acc(t.correct.size(), 0.0);
  if (exampleCount == 0) return acc;
  for (std::size_t k = 0; k < t.correct.size(); ++k) {
    std::size_t hits = 0;
    for (Label c : classes) hits += t.correct[k][c];
    acc[k] = static_cast<double>(hits) / static_cast<double>(exampleCount);
  }
  return acc;
}

SubsetDifference compareSubset(std::string name, std::vector<Label> classes,
                               const ClassTally& ta, const ClassTally& tb,
                               std::size_t totalExamples) {
  SubsetDifference d;
  d.name = std::move(name);
  d.classes = std::move(classes);
  const auto accA = subsetAccuracies(ta, d.classes, d.exampleCount);
  const auto accB = subsetAccuracies(tb, d.classes, d.exampleCount);
  d.share = static_cast<double>(d.exampleCount) / static_cast<double>(totalExamples);
  d.meanAccuracyA = mean(accA);
  d.meanAccuracyB = mean(accB);
  d.semA = standardError(accA);
  d.semB = standardError(accB);
  d.difference = d.meanAccuracyA - d.meanAccuracyB;
  d.test = welchTTest(accA, accB);
  return d;
}

void adjustFamily(std::vector<SubsetDifference>& family) {
  std::vector<double> raw;
  raw.reserve(family.size());
  for (const auto& d : family) raw.push_back(d.test.p);
  const auto adj = holmSidak(raw);
  for (std::size_t i = 0; i < family.size(); ++i) family[i].adjustedP = adj[i];
}

double logSigmoid(double eta) {  // log(1 / (1 + e^-eta))
  return eta >= 0.0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Sufficient statistics of the pooled Bernoulli observations: for each
// example, trials and successes under group 0 (a) and group 1 (b).
struct CellCounts {
  std::vector<double> n0, y0, n1, y1;
  std::vector<std::size_t> shared;  // shared-coefficient index per example
  std::size_t sharedCount = 0;
};

CellCounts cellCounts(const PredictionEnsemble& a, const PredictionEnsemble& b,
                      FactorModel model) {
  const std::size_t e = a.exampleCount();
  CellCounts c;
  c.n0.assign(e, static_cast<double>(a.modelCount()));
  c.n1.assign(e, static_cast<double>(b.modelCount()));
  c.y0.assign(e, 0.0);
  c.y1.assign(e, 0.0);
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t k = 0; k < a.modelCount(); ++k) c.y0[i] += a.correct(k, i) ? 1.0 : 0.0;
    for (std::size_t k = 0; k < b.modelCount(); ++k) c.y1[i] += b.correct(k, i) ? 1.0 : 0.0;
  }
  c.shared.assign(e, 0);
  switch (model) {
    case FactorModel::kA:
      c.sharedCount = 1;
      break;
    case FactorModel::kB: {
      std::vector<std::size_t> compact(a.classCount(), SIZE_MAX);
      for (std::size_t i = 0; i < e; ++i) {
        const Label l = a.trueLabels()[i];
        if (compact[l] == SIZE_MAX) compact[l] = c.sharedCount++;
        c.shared[i] = compact[l];
      }
      break;
    }
    case FactorModel::kC:
      for (std::size_t i = 0; i < e; ++i) c.shared[i] = i;
      c.sharedCount = e;
      break;
  }
  return c;
}

struct Objective {
  const CellCounts& c;
  double ridge;

  double penalizedLogLik(const std::vector<double>& alpha, const std::vector<double>& beta) const {
    double ll = 0.0;
    double pen = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double e0 = alpha[i];
      const double e1 = alpha[i] + beta[c.shared[i]];
      ll += c.y0[i] * logSigmoid(e0) + (c.n0[i] - c.y0[i]) * logSigmoid(-e0);
      ll += c.y1[i] * logSigmoid(e1) + (c.n1[i] - c.y1[i]) * logSigmoid(-e1);
      pen += alpha[i] * alpha[i];
    }
    for (double v : beta) pen += v * v;
    return ll - 0.5 * ridge * pen;
  }
};

}  // namespace

PredictionEnsemble concatenate(const PredictionEnsemble& a, const PredictionEnsemble& b,
                               std::string groupName) {
  requireSameExamples(a, b);
  std::vector<std::vector<Label>> rows;
  std::vector<std::string> names;
  for (const auto* e : {&a, &b}) {
    for (std::size_t k = 0; k < e->modelCount(); ++k) {
      rows.emplace_back(e->predicted(k).begin(), e->predicted(k).end());
      names.push_back(e->groupName() + "/" + e->modelNames()[k]);
    }
  }
  return PredictionEnsemble(std::move(groupName),
                            std::vector<Label>(a.trueLabels().begin(), a.trueLabels().end()),
                            a.classCount(), std::move(rows), std::move(names));
}

std::vector<double> perExampleAccuracy(const PredictionEnsemble& e) {
  std::vector<double> acc(e.exampleCount(), 0.0);
  for (std::size_t i = 0; i < e.exampleCount(); ++i) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < e.modelCount(); ++k) hits += e.correct(k, i) ? 1 : 0;
    acc[i] = static_cast<double>(hits) / static_cast<double>(e.modelCount());
  }
  return acc;
}

std::vector<double> perModelAccuracy(const PredictionEnsemble& e, std::span<const Label> classes) {
  std::vector<bool> selected(e.classCount(), classes.empty());
  for (Label c : classes) {
    if (c >= e.classCount()) throw InvalidArgumentError("class id out of range");
    selected[c] = true;
  }
  std::size_t count = 0;
  std::vector<std::size_t> hits(e.modelCount(), 0);
  for (std::size_t i = 0; i < e.exampleCount(); ++i) {
    if (!selected[e.trueLabels()[i]]) continue;
    ++count;
    for (std::size_t k = 0; k < e.modelCount(); ++k) hits[k] += e.correct(k, i) ? 1 : 0;
  }
  if (count == 0) throw DegenerateInputError("no examples belong to the requested classes");
  std::vector<double> acc(e.modelCount());
  for (std::size_t k = 0; k < acc.size(); ++k)
    acc[k] = static_cast<double>(hits[k]) / static_cast<double>(count);
  return acc;
}

std::size_t GroupComparison::significantClasses(double alpha) const {
  return static_cast<std::size_t>(std::count_if(
      perClass.begin(), perClass.end(),
      [alpha](const SubsetDifference& d) { return d.adjustedP < alpha; }));
}

GroupComparison classLevelComparison(const PredictionEnsemble& a, const PredictionEnsemble& b,
                                     std::span<const ClassSet> classSets) {
  requireSameExamples(a, b);
  if (a.modelCount() < 2 || b.modelCount() < 2) {
    throw InvalidArgumentError("class-level comparison needs at least 2 models per group");
  }
  GroupComparison out;
  out.groupA = a.groupName();
  out.groupB = b.groupName();
  out.perExampleAccA = perExampleAccuracy(a);
  out.perExampleAccB = perExampleAccuracy(b);
  out.overallAccuracyA = mean(perModelAccuracy(a));
  out.overallAccuracyB = mean(perModelAccuracy(b));

  const ClassTally ta = tally(a);
  const ClassTally tb = tally(b);
  const std::size_t total = a.exampleCount();
  for (std::size_t c = 0; c < a.classCount(); ++c) {
    if (ta.examples[c] == 0) {
      out.emptyClasses.push_back(static_cast<Label>(c));
      continue;
    }
    out.perClass.push_back(compareSubset("class " + std::to_string(c),
                                         {static_cast<Label>(c)}, ta, tb, total));
  }
  adjustFamily(out.perClass);

  for (const auto& set : classSets) {
    std::vector<Label> classes = set.classes;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (Label c : classes) {
      if (c >= a.classCount()) {
        throw InvalidArgumentError("class set '" + set.name + "' names class " +
                                   std::to_string(c) + " outside the label space");
      }
    }
    auto d = compareSubset(set.name, std::move(classes), ta, tb, total);
    if (d.exampleCount == 0) {
      throw DegenerateInputError("class set '" + set.name + "' covers no examples");
    }
    out.perClassSet.push_back(std::move(d));
  }
  adjustFamily(out.perClassSet);
  return out;
}

std::string_view toString(FactorModel m) noexcept {
  switch (m) {
    case FactorModel::kA: return "A";
    case FactorModel::kB: return "B";
    case FactorModel::kC: return "C";
  }
  return "?";
}

FactorModelFit fitFactorModel(const PredictionEnsemble& a, const PredictionEnsemble& b,
                              FactorModel model, const FactorFitConfig& config) {
  requireSameExamples(a, b);
  if (!(config.ridge > 0.0)) {
    throw InvalidArgumentError("factor model: ridge must be positive");
  }
  const CellCounts c = cellCounts(a, b, model);
  const std::size_t e = c.n0.size();
  const std::size_t q = c.sharedCount;
  const Objective objective{c, config.ridge};
  const double lambda = config.ridge;

  std::vector<double> alpha(e, 0.0);
  std::vector<double> beta(q, 0.0);
  std::vector<double> p0(e), p1(e), ga(e), gb(q), da(e), hb(q), rb(q), db(q), w1(e);

  FactorModelFit fit;
  fit.model = model;
  fit.ridge = lambda;
  double current = objective.penalizedLogLik(alpha, beta);
  bool converged = false;
  std::size_t it = 0;
  for (;; ++it) {
    std::fill(gb.begin(), gb.end(), 0.0);
    std::fill(hb.begin(), hb.end(), lambda);
    double gmax = 0.0;
    for (std::size_t i = 0; i < e; ++i) {
      p0[i] = sigmoid(alpha[i]);
      p1[i] = sigmoid(alpha[i] + beta[c.shared[i]]);
      const double r0 = c.y0[i] - c.n0[i] * p0[i];
      const double r1 = c.y1[i] - c.n1[i] * p1[i];
      ga[i] = r0 + r1 - lambda * alpha[i];
      gb[c.shared[i]] += r1;
      const double w0 = c.n0[i] * p0[i] * (1.0 - p0[i]);
      w1[i] = c.n1[i] * p1[i] * (1.0 - p1[i]);
      da[i] = w0 + w1[i] + lambda;
      hb[c.shared[i]] += w1[i];
      gmax = std::max(gmax, std::abs(ga[i]));
    }
    for (std::size_t s = 0; s < q; ++s) {
      gb[s] -= lambda * beta[s];
      gmax = std::max(gmax, std::abs(gb[s]));
    }
    fit.gradientNorm = gmax;
    if (gmax < config.gradientTolerance) {
      converged = true;
      break;
    }
    if (it >= config.maxIterations) break;

    // Newton direction. The Hessian couples alpha_i only with
    // beta_shared(i), so eliminating alpha leaves a diagonal system in beta.
    rb = gb;
    for (std::size_t i = 0; i < e; ++i) {
      hb[c.shared[i]] -= w1[i] * w1[i] / da[i];
      rb[c.shared[i]] -= w1[i] * ga[i] / da[i];
    }
    for (std::size_t s = 0; s < q; ++s) db[s] = rb[s] / hb[s];
    std::vector<double> stepA(e);
    for (std::size_t i = 0; i < e; ++i) stepA[i] = (ga[i] - w1[i] * db[c.shared[i]]) / da[i];

    double t = 1.0;
    bool improved = false;
    std::vector<double> alphaNext(e), betaNext(q);
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      for (std::size_t i = 0; i < e; ++i) alphaNext[i] = alpha[i] + t * stepA[i];
      for (std::size_t s = 0; s < q; ++s) betaNext[s] = beta[s] + t * db[s];
      const double trial = objective.penalizedLogLik(alphaNext, betaNext);
      if (trial >= current) {
        alpha.swap(alphaNext);
        beta.swap(betaNext);
        current = trial;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  fit.iterations = it;
  if (!converged) {
    throw ConvergenceError("factor model " + std::string(toString(model)) +
                           ": gradient norm " + std::to_string(fit.gradientNorm) +
                           " above tolerance after " + std::to_string(it) + " iterations");
  }

  double sq = 0.0;
  double ll = 0.0;
  double observations = 0.0;
  fit.fittedA.resize(e);
  fit.fittedB.resize(e);
  for (std::size_t i = 0; i < e; ++i) {
    const double eta0 = alpha[i];
    const double eta1 = alpha[i] + beta[c.shared[i]];
    const double pi0 = sigmoid(eta0);
    const double pi1 = sigmoid(eta1);
    fit.fittedA[i] = pi0;
    fit.fittedB[i] = pi1;
    sq += c.y0[i] * (1.0 - pi0) * (1.0 - pi0) + (c.n0[i] - c.y0[i]) * pi0 * pi0;
    sq += c.y1[i] * (1.0 - pi1) * (1.0 - pi1) + (c.n1[i] - c.y1[i]) * pi1 * pi1;
    if (c.y0[i] > 0) ll += c.y0[i] * logSigmoid(eta0);
    if (c.n0[i] > c.y0[i]) ll += (c.n0[i] - c.y0[i]) * logSigmoid(-eta0);
    if (c.y1[i] > 0) ll += c.y1[i] * logSigmoid(eta1);
    if (c.n1[i] > c.y1[i]) ll += (c.n1[i] - c.y1[i]) * logSigmoid(-eta1);
    observations += c.n0[i] + c.n1[i];
    if (c.y0[i] == 0 || c.y0[i] == c.n0[i]) ++fit.separatedCells;
    if (c.y1[i] == 0 || c.y1[i] == c.n1[i]) ++fit.separatedCells;
  }
  fit.observationCount = static_cast<std::size_t>(observations);
  fit.residualVariance = sq / observations;
  fit.logLikelihood = ll;
  fit.deviance = -2.0 * ll;
  // Example intercepts (one per example, the overall intercept absorbed)
  // plus the shared group coefficients.
  fit.coefficientCount = e + q;
  fit.aic = 2.0 * static_cast<double>(fit.coefficientCount) - 2.0 * ll;
  return fit;
}

double pseudoRSquared(const FactorModelFit& fitA, const FactorModelFit& fitB,
                      const FactorModelFit& fitC) {
  if (fitA.model != FactorModel::kA || fitB.model != FactorModel::kB ||
      fitC.model != FactorModel::kC) {
    throw InvalidArgumentError("pseudoRSquared: expects fits of models A, B, C in order");
  }
  if (fitA.observationCount != fitB.observationCount ||
      fitA.observationCount != fitC.observationCount) {
    throw InvalidArgumentError("pseudoRSquared: fits cover different observations");
  }
  const double denom = fitA.residualVariance - fitC.residualVariance;
  if (!(denom > 1e-12 * std::max(fitA.residualVariance, 1e-300))) {
    throw DegenerateInputError(
        "pseudoRSquared undefined: model C explains no variance beyond model A");
  }
  return (fitA.residualVariance - fitB.residualVariance) / denom;
}

}  // namespace repsim
