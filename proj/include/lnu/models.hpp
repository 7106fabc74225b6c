#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lnu/graph.hpp"
#include "lnu/lnu_layer.hpp"
#include "lnu/tensor.hpp"

namespace lnu {

enum class ModelKind { logicron, logicron_neg, perceptron };
enum class HiddenActivation { sigmoid, relu, gelu };

std::string_view to_string(ModelKind kind);
std::string_view to_string(HiddenActivation act);
ModelKind parse_model_kind(std::string_view text);
HiddenActivation parse_activation(std::string_view text);

/// One hidden block (LNU layer or dense + activation) followed by a dense
/// layer and a sigmoid.
struct ModelSpec {
  std::string name;
  ModelKind kind = ModelKind::logicron;
  std::size_t input_dim = 3;
  /// LNU units per branch (o), or perceptron hidden width (h).
  std::size_t hidden = 11;
  HiddenActivation activation = HiddenActivation::relu;
  double beta = 10.0;
  bool trainable_beta = true;
  bool hidden_bias = false;

  void validate() const;
};

/// MLP-Sigmoid, MLP-ReLU, MLP-GeLU (h = 24), Logicron (o = 11) and
/// Logicron+Neg (o = 9), sized to 97 / 97 / 97 / 90 / 110 parameters.
std::vector<ModelSpec> default_model_specs(std::size_t input_dim = 3);

struct Parameter {
  std::string name;
  Tensor value;
};

struct ParamCount {
  std::size_t total = 0;
  std::vector<std::pair<std::string, std::size_t>> by_component;
};

class Model {
 public:
  static Model build(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  std::span<const Parameter> parameters() const { return params_; }
  std::span<Parameter> parameters() { return params_; }

  /// Registers every parameter as a trainable leaf, in `parameters()` order.
  std::vector<NodeId> bind(Graph& graph) const;
  /// n x d -> n x 1 probabilities.
  NodeId forward(Graph& graph, NodeId x, std::span<const NodeId> params) const;

  Tensor predict_proba(const Tensor& x) const;
  /// Probability > 0.5 -> true.
  std::vector<bool> predict(const Tensor& x) const;

 private:
  ModelSpec spec_;
  std::vector<Parameter> params_;
};

ParamCount count_params(const Model& model);

/// Closed-form count:
///   perceptron   d*h (+h) + h + 1
///   logicron     2*d*o + 2*o + 1 (+1 trainable beta)
///   logicron_neg 3*d*o + 3*o + 1 (+1 trainable beta)
std::size_t expected_param_count(const ModelSpec& spec);
std::string param_count_formula(const ModelSpec& spec);

/// {"model": name, "parameters": {name: {"shape": [r, c], "data": [...]}}}
nlohmann::json export_parameters(const Model& model);

}  // namespace lnu
