#include "mcaimem/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mcaimem/error.hpp"
#include "mcaimem/io.hpp"
#include "mcaimem/tensor_io.hpp"

namespace mcaimem {

namespace {

using nlohmann::json;

std::int8_t saturate(double v) { return static_cast<std::int8_t>(std::clamp<long>(std::lround(v), -128L, 127L)); }

constexpr std::uint64_t kWeightStreamBase = 1ull << 40;

std::uint64_t activation_stream(std::size_t layer, std::size_t sample) {
  return (static_cast<std::uint64_t>(layer) << 32) | static_cast<std::uint64_t>(sample);
}

}  // namespace

void QuantModel::validate() const {
  if (layers.empty()) throw ParseError("model has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.in == 0 || l.out == 0) throw ParseError("layer '" + l.name + "' has a zero dimension");
    if (l.weights.size() != l.in * l.out) throw ParseError("layer '" + l.name + "': weight blob size mismatch");
    if (l.bias.size() != l.out) throw ParseError("layer '" + l.name + "': bias blob size mismatch");
    if (i > 0 && layers[i - 1].out != l.in) throw ParseError("layer '" + l.name + "': input width mismatch");
    if (!(l.input_scale > 0.0 && l.weight_scale > 0.0 && l.output_scale > 0.0))
      throw ParseError("layer '" + l.name + "': scales must be positive");
  }
}

QuantModel QuantModel::load(const std::filesystem::path& manifest) {
  QuantModel model;
  const auto dir = manifest.parent_path();
  try {
    const json j = json::parse(read_text_file(manifest));
    for (const auto& jl : j.at("layers")) {
      QuantLayer l;
      l.name = jl.value("name", "fc" + std::to_string(model.layers.size()));
      l.in = jl.at("in").get<std::size_t>();
      l.out = jl.at("out").get<std::size_t>();
      l.input_scale = jl.at("input_scale").get<double>();
      l.weight_scale = jl.at("weight_scale").get<double>();
      l.output_scale = jl.value("output_scale", 1.0);
      l.relu = jl.value("relu", false);
      const auto w = read_binary_file(dir / jl.at("weights").get<std::string>());
      l.weights.assign(w.begin(), w.end());
      const auto b = read_binary_file(dir / jl.at("bias").get<std::string>());
      if (b.size() % 4 != 0) throw ParseError("layer '" + l.name + "': bias blob is not int32");
      for (std::size_t k = 0; k < b.size(); k += 4) {
        const std::uint32_t u = std::uint32_t{b[k]} | std::uint32_t{b[k + 1]} << 8 | std::uint32_t{b[k + 2]} << 16 |
                                std::uint32_t{b[k + 3]} << 24;
        l.bias.push_back(static_cast<std::int32_t>(u));
      }
      model.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw ParseError("model manifest " + manifest.string() + ": " + e.what());
  }
  model.validate();
  return model;
}

Dataset Dataset::load(const std::filesystem::path& inputs, const std::filesystem::path& labels_csv) {
  const Int8Tensor t = read_tensor(inputs);
  if (t.shape.size() != 2) throw ParseError(inputs.string() + ": expected a 2-D tensor (samples,features)");
  Dataset d;
  d.features = t.shape[1];
  d.inputs = t.data;

  std::istringstream in(read_text_file(labels_csv));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      d.labels.push_back(std::stoi(line, &used));
    } catch (const std::exception&) {
      throw ParseError(labels_csv.string() + " line " + std::to_string(line_no) + ": bad label '" + line + "'");
    }
  }
  if (d.labels.size() != t.shape[0])
    throw ParseError("dataset has " + std::to_string(t.shape[0]) + " samples but " +
                     std::to_string(d.labels.size()) + " labels");
  return d;
}

std::vector<int> predict(const QuantModel& model, const Dataset& data, const std::optional<InjectionConfig>& inj) {
  model.validate();
  if (data.features != model.layers.front().in) throw DomainError("dataset feature width does not match model");

  std::vector<std::vector<std::int8_t>> weights;
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const auto& w = model.layers[li].weights;
    weights.push_back(inj ? inject(w, *inj, kWeightStreamBase + li) : w);
  }

  std::vector<int> predicted(data.size());
  std::vector<std::int8_t> act;
  std::vector<std::int32_t> acc;
  for (std::size_t s = 0; s < data.size(); ++s) {
    act.assign(data.inputs.begin() + static_cast<std::ptrdiff_t>(s * data.features),
               data.inputs.begin() + static_cast<std::ptrdiff_t>((s + 1) * data.features));
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
      const auto& layer = model.layers[li];
      if (inj) act = inject(act, *inj, activation_stream(li, s));
      acc.assign(layer.out, 0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        std::int32_t sum = layer.bias[o];
        const std::int8_t* row = weights[li].data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) sum += std::int32_t{row[i]} * std::int32_t{act[i]};
        acc[o] = sum;
      }
      if (li + 1 == model.layers.size()) break;
      const double scale = layer.input_scale * layer.weight_scale / layer.output_scale;
      act.resize(layer.out);
      for (std::size_t o = 0; o < layer.out; ++o) {
        std::int8_t q = saturate(acc[o] * scale);
        act[o] = layer.relu ? std::max<std::int8_t>(q, 0) : q;
      }
    }
    predicted[s] = static_cast<int>(std::max_element(acc.begin(), acc.end()) - acc.begin());
  }
  return predicted;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  if (predicted.size() != labels.size()) throw DomainError("prediction/label count mismatch");
  if (labels.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

ClassifierResult eval_classifier(const QuantModel& model, const Dataset& data, const InjectionConfig& cfg) {
  ClassifierResult r;
  r.accuracy_clean = accuracy(predict(model, data), data.labels);
  r.accuracy_injected = accuracy(predict(model, data, cfg), data.labels);
  return r;
}

}  // namespace mcaimem
