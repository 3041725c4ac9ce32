#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcaimem/fault.hpp"

namespace mcaimem {

/// Fully-connected INT8 layer: y = W x + b with W stored row-major
/// [out][in], bias in int32 at scale input_scale * weight_scale.
struct QuantLayer {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<std::int8_t> weights;
  std::vector<std::int32_t> bias;
  double input_scale = 1.0;
  double weight_scale = 1.0;
  double output_scale = 1.0;  // unused on the last layer
  bool relu = false;
};

struct QuantModel {
  std::vector<QuantLayer> layers;

  /// JSON manifest:
  ///   {"layers": [{"name", "in", "out", "weights": "<int8 blob>",
  ///                "bias": "<int32 LE blob>", "input_scale", "weight_scale",
  ///                "output_scale", "relu"}]}
  /// Blob paths are relative to the manifest.
  static QuantModel load(const std::filesystem::path& manifest);
  void validate() const;
};

struct Dataset {
  std::size_t features = 0;
  std::vector<std::int8_t> inputs;  // [samples][features]
  std::vector<int> labels;

  [[nodiscard]] std::size_t size() const { return labels.size(); }

  /// Inputs: INT8 tensor file with sidecar header, shape samples,features.
  /// Labels: CSV with a header row, one integer label per line.
  static Dataset load(const std::filesystem::path& inputs, const std::filesystem::path& labels_csv);
};

/// Integer forward pass: int32 accumulation, float rescale, round and
/// saturate to INT8 between layers; class = argmax of the last accumulator.
/// With injection, each layer's weights are corrupted once per evaluation
/// and each sample's input activations before every layer.
std::vector<int> predict(const QuantModel& model, const Dataset& data,
                         const std::optional<InjectionConfig>& injection = std::nullopt);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels);

struct ClassifierResult {
  double accuracy_clean = 0.0;
  double accuracy_injected = 0.0;
  [[nodiscard]] double drop() const { return accuracy_clean - accuracy_injected; }
};

ClassifierResult eval_classifier(const QuantModel& model, const Dataset& data, const InjectionConfig& cfg);

}  // namespace mcaimem
