#include "repsim/layer.hpp"

#include <string>

#include "repsim/error.hpp"

namespace repsim {

LayerSet::LayerSet(std::vector<Layer> layers) {
  layers_.reserve(layers.size());
  for (auto& l : layers) add(std::move(l));
}

void LayerSet::add(Layer layer) {
  if (!layers_.empty() && layer.activations.rows() != exampleCount()) {
    throw DimensionError("layer '" + layer.name + "' has " +
                         std::to_string(layer.activations.rows()) +
                         " examples, expected " + std::to_string(exampleCount()));
  }
  if (find(layer.name)) {
    throw InvalidArgumentError("duplicate layer name '" + layer.name + "'");
  }
  layers_.push_back(std::move(layer));
}

std::size_t LayerSet::exampleCount() const noexcept {
  return layers_.empty() ? 0 : layers_.front().activations.rows();
}

std::vector<std::string> LayerSet::names() const {
  std::vector<std::string> out;
  out.reserve(layers_.size());
  for (const auto& l : layers_) out.push_back(l.name);
  return out;
}

std::optional<std::size_t> LayerSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i].name == name) return i;
  return std::nullopt;
}

}  // namespace repsim
