#ifndef REPSIM_DUMP_FORMAT_HPP
#define REPSIM_DUMP_FORMAT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "repsim/layer.hpp"
#include "repsim/predictions.hpp"

namespace repsim {

// Activation dump (NAF1), little-endian throughout:
//
//   "NAF1"  u16 formatVersion  u32 exampleCount  u32 layerCount
//   per layer:
//     u16 nameLen, nameLen bytes UTF-8 name
//     u8 stageTag, u8 positionTag (0 pre, 1 post, 2 other), u8 dtype (0 f32, 1 f64)
//     u32 featureCount, exampleCount * featureCount values, row-major
//
// Prediction dump (NPF1):
//
//   "NPF1"  u32 modelCount  u32 exampleCount  u32 classCount
//   exampleCount x u16 true labels
//   per model: u16 nameLen, name, exampleCount x u16 predicted labels
//
// Readers consume the whole buffer: declared sizes must match the payload
// exactly, and every failure is an IoError with a specific kind.

inline constexpr std::uint16_t kActivationFormatVersion = 1;

LayerSet parseActivationDump(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encodeActivationDump(const LayerSet& layers);

LayerSet readActivationDump(const std::filesystem::path& path);
void writeActivationDump(const LayerSet& layers, const std::filesystem::path& path);

struct ModelPredictions {
  std::string name;
  std::vector<std::uint16_t> labels;
};

struct PredictionDump {
  std::uint32_t classCount = 0;
  std::vector<std::uint16_t> trueLabels;
  std::vector<ModelPredictions> models;
};

PredictionDump parsePredictionDump(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encodePredictionDump(const PredictionDump& dump);

PredictionDump readPredictionDump(const std::filesystem::path& path);
void writePredictionDump(const PredictionDump& dump, const std::filesystem::path& path);

PredictionEnsemble toEnsemble(const PredictionDump& dump, std::string groupName);

std::vector<std::uint8_t> readFileBytes(const std::filesystem::path& path);
void writeFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace repsim

#endif  // REPSIM_DUMP_FORMAT_HPP
