#ifndef REPSIM_LAYER_HPP
#define REPSIM_LAYER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repsim/matrix.hpp"

namespace repsim {

/// Where a capture point sits relative to a residual connection.
enum class LayerPosition : std::uint8_t {
  kPreResidual = 0,
  kPostResidual = 1,
  kOther = 2,
};

/// On-disk precision of a layer's values. Compute is always double.
enum class StorageType : std::uint8_t {
  kFloat32 = 0,
  kFloat64 = 1,
};

/// One layer's responses to m examples (an m x p activation matrix) with the
/// metadata carried by activation dumps.
struct Layer {
  std::string name;
  std::uint8_t stage = 0;
  LayerPosition position = LayerPosition::kOther;
  StorageType storage = StorageType::kFloat64;
  Matrix activations;
};

/// Ordered collection of layers (input to output) that index the same
/// examples in the same order. Names are unique.
class LayerSet {
 public:
  LayerSet() = default;
  explicit LayerSet(std::vector<Layer> layers);

  /// Appends a layer; throws DimensionError on example-count mismatch and
  /// InvalidArgumentError on a duplicate name.
  void add(Layer layer);

  std::size_t size() const noexcept { return layers_.size(); }
  bool empty() const noexcept { return layers_.empty(); }
  /// Shared example count; 0 for an empty set.
  std::size_t exampleCount() const noexcept;

  const Layer& operator[](std::size_t i) const { return layers_.at(i); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<std::string> names() const;
  std::optional<std::size_t> find(const std::string& name) const;

  auto begin() const noexcept { return layers_.begin(); }
  auto end() const noexcept { return layers_.end(); }

 private:
  std::vector<Layer> layers_;
};

}  // namespace repsim

#endif  // REPSIM_LAYER_HPP
