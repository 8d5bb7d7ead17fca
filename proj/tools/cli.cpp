#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "repsim/blockstruct.hpp"
#include "repsim/cka.hpp"
#include "repsim/dump_format.hpp"
#include "repsim/error.hpp"
#include "repsim/predictions.hpp"
#include "repsim/probes.hpp"
#include "repsim/report.hpp"
#include "repsim/spectral.hpp"

namespace repsim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
  writeFileBytes(path, {p, text.size()});
}

std::string_view positionName(LayerPosition p) {
  switch (p) {
    case LayerPosition::kPreResidual: return "pre";
    case LayerPosition::kPostResidual: return "post";
    case LayerPosition::kOther: break;
  }
  return "other";
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// ---------------------------------------------------------------- heatmap

struct HeatmapArgs {
  std::string input, inputB, mode = "minibatch", estimator = "unbiased", out, image;
  std::size_t batchSize = 256, epochs = 10;
  std::uint64_t seed = 0;
};

int runHeatmap(const HeatmapArgs& a, std::ostream& out, std::ostream& err) {
  HeatmapConfig cfg;
  cfg.mode = a.mode == "full" ? HeatmapMode::kFull : HeatmapMode::kMinibatch;
  cfg.estimator = a.estimator == "biased" ? Estimator::kBiased : Estimator::kUnbiased;
  cfg.minibatch = {a.batchSize, a.epochs, a.seed};
  if (cfg.mode == HeatmapMode::kMinibatch && a.estimator == "biased") {
    err << "warning: minibatch mode always uses the unbiased estimator\n";
  }

  const LayerSet layersA = readActivationDump(a.input);
  CkaHeatmap h = a.inputB.empty() ? heatmap(layersA, cfg)
                                  : heatmap(layersA, readActivationDump(a.inputB), cfg);
  for (const auto& d : h.diagnostics()) err << "warning: " << d << '\n';

  emit(heatmapToCsv(h), a.out, out);
  if (!a.image.empty()) writeFileBytes(a.image, heatmapToPgm(h));
  return kExitOk;
}

// --------------------------------------------------------------- spectral

struct SpectralArgs {
  std::string input, out, removePc1Out, cosineMapOut;
  std::size_t topK = 5;
  std::vector<unsigned> poolStages;
};

void spectralRow(std::ostringstream& csv, const std::string& name, const Matrix& x,
                 std::size_t topK, std::ostream& err) {
  csv << csvField(name);
  try {
    const SpectralSummary s = summarize(x, name);
    csv << ',' << formatDouble(s.totalVariance);
    for (std::size_t k = 0; k < topK; ++k) {
      csv << ',' << (k < s.componentCount() ? formatDouble(s.varianceFractions[k]) : "NA");
    }
  } catch (const DegenerateInputError& e) {
    err << "warning: " << name << ": " << e.what() << '\n';
    csv << ",0";
    for (std::size_t k = 0; k < topK; ++k) csv << ",NA";
  }
  csv << '\n';
}

int runSpectral(const SpectralArgs& a, std::ostream& out, std::ostream& err) {
  const LayerSet layers = readActivationDump(a.input);

  std::ostringstream csv;
  csv << "layer,total_variance";
  for (std::size_t k = 1; k <= a.topK; ++k) csv << ",pc" << k;
  csv << '\n';
  for (const Layer& l : layers) spectralRow(csv, l.name, l.activations, a.topK, err);
  if (!a.poolStages.empty()) {
    std::vector<std::uint8_t> stages;
    std::string name = "pooled:stages";
    for (unsigned s : a.poolStages) {
      if (s > 255) throw InvalidArgumentError("stage tags are 0..255");
      stages.push_back(static_cast<std::uint8_t>(s));
      name += (stages.size() == 1 ? "=" : "+") + std::to_string(s);
    }
    spectralRow(csv, name, poolStages(layers, stages), a.topK, err);
  }
  emit(csv.str(), a.out, out);

  if (!a.cosineMapOut.empty()) emit(heatmapToCsv(firstPcCosineMap(layers)), a.cosineMapOut, out);
  if (!a.removePc1Out.empty()) writeActivationDump(removeFirstPc(layers), a.removePc1Out);
  return kExitOk;
}

// ----------------------------------------------------------------- blocks

struct BlocksArgs {
  std::string heatmap, out;
  double threshold = 0.9;
  std::size_t minSize = 5;
};

int runBlocks(const BlocksArgs& a, std::ostream& out, std::ostream&) {
  const CkaHeatmap h = readHeatmapCsv(a.heatmap);
  const BlockReport report = detectBlocks(h, a.threshold, a.minSize);

  ordered_json j;
  j["threshold"] = report.threshold;
  j["min_size"] = report.minSize;
  j["layers"] = h.rowNames();
  j["blocks"] = ordered_json::array();
  for (const Block& b : report.blocks) {
    j["blocks"].push_back({{"start", b.startLayer},
                           {"end", b.endLayer},
                           {"start_layer", h.rowNames()[b.startLayer]},
                           {"end_layer", h.rowNames()[b.endLayer]},
                           {"size", b.size()},
                           {"mean_inside_cka", b.meanInsideCka},
                           {"mean_boundary_contrast", b.meanBoundaryContrast}});
  }
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

// ------------------------------------------------------------------ probe

struct ProbeArgs {
  std::string input, labels, out;
  ProbeConfig config;
};

std::vector<Label> readLabels(const std::string& path) {
  const std::vector<std::uint8_t> bytes = readFileBytes(path);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, "NPF1")) {
    const PredictionDump dump = parsePredictionDump(bytes);
    return {dump.trueLabels.begin(), dump.trueLabels.end()};
  }
  std::vector<Label> labels;
  const char* p = reinterpret_cast<const char*>(bytes.data());
  const char* end = p + bytes.size();
  while (p != end) {
    if (std::string_view(" \t\r\n,").find(*p) != std::string_view::npos) {
      ++p;
      continue;
    }
    Label v = 0;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      throw IoError(IoErrorKind::kMalformedText,
                    path + ": labels must be non-negative integers or an NPF1 dump");
    }
    labels.push_back(v);
    p = next;
  }
  return labels;
}

int runProbe(const ProbeArgs& a, std::ostream& out, std::ostream&) {
  const LayerSet layers = readActivationDump(a.input);
  const std::vector<Label> labels = readLabels(a.labels);
  if (labels.size() != layers.exampleCount()) {
    throw DimensionError("label count " + std::to_string(labels.size()) +
                         " does not match example count " +
                         std::to_string(layers.exampleCount()));
  }
  const auto results = probeCurve(layers, labels, a.config);

  std::ostringstream csv;
  csv << "layer,stage,position,train_accuracy,test_accuracy\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ProbeResult& r = results[i];
    csv << csvField(r.layerName) << ',' << int{layers[i].stage} << ','
        << positionName(r.position) << ',' << formatDouble(r.trainAccuracy) << ','
        << formatDouble(r.testAccuracy) << '\n';
  }
  emit(csv.str(), a.out, out);
  return kExitOk;
}

// ------------------------------------------------------------------ preds

struct PredsArgs {
  std::string a, b, classSets, out;
};

std::vector<ClassSet> readClassSets(const std::string& path) {
  const auto bytes = readFileBytes(path);
  const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  auto malformed = [&](const std::string& why) {
    return IoError(IoErrorKind::kMalformedText, path + ": " + why);
  };
  if (j.is_discarded()) throw malformed("not valid JSON");
  if (!j.is_array()) throw malformed("expected an array of {\"name\", \"classes\"} objects");
  std::vector<ClassSet> sets;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
        !item.contains("classes") || !item["classes"].is_array()) {
      throw malformed("each class set needs a string \"name\" and a \"classes\" array");
    }
    ClassSet s{item["name"].get<std::string>(), {}};
    for (const auto& c : item["classes"]) {
      if (!c.is_number_unsigned()) throw malformed("class ids must be non-negative integers");
      s.classes.push_back(c.get<Label>());
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

ordered_json subsetJson(const SubsetDifference& d) {
  ordered_json j{{"name", d.name},
                 {"classes", d.classes},
                 {"examples", d.exampleCount},
                 {"share", d.share},
                 {"mean_accuracy_a", d.meanAccuracyA},
                 {"mean_accuracy_b", d.meanAccuracyB},
                 {"sem_a", d.semA},
                 {"sem_b", d.semB},
                 {"difference", d.difference},
                 {"t", d.test.t},
                 {"df", d.test.df},
                 {"p", d.test.p},
                 {"adjusted_p", d.adjustedP}};
  if (d.test.diagnostic != WelchDiagnostic::kNone) {
    j["diagnostic"] = toString(d.test.diagnostic);
  }
  return j;
}

PredictionEnsemble loadEnsemble(const std::string& path) {
  return toEnsemble(readPredictionDump(path), fs::path(path).stem().string());
}

int runCompare(const PredsArgs& a, std::ostream& out, std::ostream& err) {
  const PredictionEnsemble ea = loadEnsemble(a.a);
  const PredictionEnsemble eb = loadEnsemble(a.b);
  const std::vector<ClassSet> sets =
      a.classSets.empty() ? std::vector<ClassSet>{} : readClassSets(a.classSets);
  const GroupComparison c = classLevelComparison(ea, eb, sets);
  for (Label k : c.emptyClasses) err << "warning: class " << k << " has no examples\n";

  ordered_json j;
  j["group_a"] = c.groupA;
  j["group_b"] = c.groupB;
  j["models_a"] = ea.modelCount();
  j["models_b"] = eb.modelCount();
  j["examples"] = ea.exampleCount();
  j["overall_accuracy_a"] = c.overallAccuracyA;
  j["overall_accuracy_b"] = c.overallAccuracyB;
  j["significant_classes"] = c.significantClasses();
  j["empty_classes"] = c.emptyClasses;
  j["per_class"] = ordered_json::array();
  for (const auto& d : c.perClass) j["per_class"].push_back(subsetJson(d));
  j["class_sets"] = ordered_json::array();
  for (const auto& d : c.perClassSet) j["class_sets"].push_back(subsetJson(d));
  j["per_example_accuracy_a"] = c.perExampleAccA;
  j["per_example_accuracy_b"] = c.perExampleAccB;
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

int runFactorModels(const PredsArgs& a, std::ostream& out, std::ostream& err) {
  const PredictionEnsemble ea = loadEnsemble(a.a);
  const PredictionEnsemble eb = loadEnsemble(a.b);
  std::vector<FactorModelFit> fits;
  for (FactorModel m : {FactorModel::kA, FactorModel::kB, FactorModel::kC}) {
    fits.push_back(fitFactorModel(ea, eb, m));
  }

  ordered_json j;
  j["observations"] = fits.front().observationCount;
  j["models"] = ordered_json::array();
  for (const auto& f : fits) {
    j["models"].push_back({{"model", toString(f.model)},
                           {"residual_variance", f.residualVariance},
                           {"log_likelihood", f.logLikelihood},
                           {"deviance", f.deviance},
                           {"aic", f.aic},
                           {"coefficients", f.coefficientCount},
                           {"iterations", f.iterations},
                           {"gradient_norm", f.gradientNorm},
                           {"ridge", f.ridge},
                           {"separated_cells", f.separatedCells}});
  }
  try {
    j["v2"] = pseudoRSquared(fits[0], fits[1], fits[2]);
  } catch (const DegenerateInputError& e) {
    err << "warning: " << e.what() << '\n';
    j["v2"] = nullptr;
  }
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

// --------------------------------------------------------------- sparsity

int runSparsity(const std::string& input, const std::string& outPath, std::ostream& out,
                std::ostream& err) {
  const LayerSet layers = readActivationDump(input);
  std::ostringstream csv;
  csv << "layer,fraction_nonzero,fraction_always_zero,fraction_always_nonzero,negative_count\n";
  for (const Layer& l : layers) {
    const ReluSparsity s = reluSparsity(l.activations);
    if (!s.looksPostRelu()) {
      err << "warning: " << l.name << ": " << s.negativeCount
          << " negative entries; input does not look post-ReLU\n";
    }
    csv << csvField(l.name) << ',' << formatDouble(s.fractionNonzero) << ','
        << formatDouble(s.fractionAlwaysZero) << ',' << formatDouble(s.fractionAlwaysNonzero)
        << ',' << s.negativeCount << '\n';
  }
  emit(csv.str(), outPath, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representational similarity analysis of layer activations", "repsim"};
  app.require_subcommand(1, 1);

  HeatmapArgs hm;
  auto* heatmapCmd = app.add_subcommand("heatmap", "CKA between all pairs of layers");
  heatmapCmd->add_option("--input", hm.input, "NAF1 activation dump")->required();
  heatmapCmd->add_option("--input-b", hm.inputB, "second dump for a cross-model heatmap");
  heatmapCmd->add_option("--mode", hm.mode)
      ->check(CLI::IsMember({"full", "minibatch"}))
      ->capture_default_str();
  heatmapCmd->add_option("--estimator", hm.estimator, "HSIC estimator in full mode")
      ->check(CLI::IsMember({"biased", "unbiased"}))
      ->capture_default_str();
  heatmapCmd->add_option("--batch-size", hm.batchSize)
      ->check(CLI::Validator(
          [](std::string& v) {
            unsigned long long n = 0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
            const bool ok = ec == std::errc() && end == v.data() + v.size() && n >= 4;
            return ok ? std::string() : "batch size must be an integer of at least 4";
          },
          ">=4"))
      ->capture_default_str();
  heatmapCmd->add_option("--epochs", hm.epochs)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  heatmapCmd->add_option("--seed", hm.seed)->capture_default_str();
  heatmapCmd->add_option("--out", hm.out, "CSV path (default: stdout)");
  heatmapCmd->add_option("--image", hm.image, "binary PGM path");

  SpectralArgs sp;
  auto* spectralCmd = app.add_subcommand("spectral", "variance explained and first-PC analyses");
  spectralCmd->add_option("--input", sp.input, "NAF1 activation dump")->required();
  spectralCmd->add_option("--top-k", sp.topK)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spectralCmd->add_option("--out", sp.out, "CSV path (default: stdout)");
  spectralCmd->add_option("--pool-stages", sp.poolStages,
                          "also report the concatenation of these stages");
  spectralCmd->add_option("--remove-pc1-out", sp.removePc1Out,
                          "write activations with the first PC removed (NAF1)");
  spectralCmd->add_option("--cosine-map-out", sp.cosineMapOut,
                          "write the squared first-PC cosine map (CSV)");

  BlocksArgs bl;
  auto* blocksCmd = app.add_subcommand("blocks", "detect block structure in a heatmap CSV");
  blocksCmd->add_option("--heatmap", bl.heatmap)->required();
  blocksCmd->add_option("--threshold", bl.threshold)->capture_default_str();
  blocksCmd->add_option("--min-size", bl.minSize)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  blocksCmd->add_option("--out", bl.out, "JSON path (default: stdout)");

  ProbeArgs pr;
  auto* probeCmd = app.add_subcommand("probe", "linear probe accuracy per layer");
  probeCmd->add_option("--input", pr.input, "NAF1 activation dump")->required();
  probeCmd->add_option("--labels", pr.labels,
                       "NPF1 dump (true labels are used) or whitespace-separated integers")
      ->required();
  probeCmd->add_option("--split-seed", pr.config.splitSeed)->capture_default_str();
  probeCmd->add_option("--seed", pr.config.seed, "weight initialization")->capture_default_str();
  probeCmd->add_option("--train-fraction", pr.config.trainFraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  probeCmd->add_option("--iterations", pr.config.iterations)->capture_default_str();
  probeCmd->add_option("--step-size", pr.config.stepSize)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  probeCmd->add_option("--l2", pr.config.l2)->check(CLI::NonNegativeNumber)->capture_default_str();
  probeCmd->add_option("--out", pr.out, "CSV path (default: stdout)");

  PredsArgs pa;
  auto* predsCmd = app.add_subcommand("preds", "compare prediction ensembles");
  predsCmd->require_subcommand(1, 1);
  auto* compareCmd = predsCmd->add_subcommand("compare", "per-class Welch tests");
  auto* factorCmd = predsCmd->add_subcommand("factor-models", "logistic factor models and v^2");
  for (auto* cmd : {compareCmd, factorCmd}) {
    cmd->add_option("--a", pa.a, "NPF1 dump of group A")->required();
    cmd->add_option("--b", pa.b, "NPF1 dump of group B")->required();
    cmd->add_option("--out", pa.out, "JSON path (default: stdout)");
  }
  compareCmd->add_option("--class-sets", pa.classSets,
                         "JSON array of {\"name\": ..., \"classes\": [...]}");

  std::string sparsityInput, sparsityOut;
  auto* sparsityCmd = app.add_subcommand("sparsity", "ReLU sparsity per layer");
  sparsityCmd->add_option("--input", sparsityInput, "NAF1 activation dump")->required();
  sparsityCmd->add_option("--out", sparsityOut, "CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (heatmapCmd->parsed()) return runHeatmap(hm, out, err);
    if (spectralCmd->parsed()) return runSpectral(sp, out, err);
    if (blocksCmd->parsed()) return runBlocks(bl, out, err);
    if (probeCmd->parsed()) return runProbe(pr, out, err);
    if (compareCmd->parsed()) return runCompare(pa, out, err);
    if (factorCmd->parsed()) return runFactorModels(pa, out, err);
    if (sparsityCmd->parsed()) return runSparsity(sparsityInput, sparsityOut, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace repsim::cli
