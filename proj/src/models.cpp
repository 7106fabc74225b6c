#include "lnu/models.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lnu/random.hpp"

namespace lnu {

namespace {

Tensor dense_init(std::size_t fan_in, std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(rows, cols);
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

LnuConfig lnu_config(const ModelSpec& spec) {
  return LnuConfig{.input_dim = spec.input_dim,
                   .units = spec.hidden,
                   .beta = spec.beta,
                   .trainable_beta = spec.trainable_beta,
                   .normalize = false,
                   .include_negation = spec.kind == ModelKind::logicron_neg};
}

std::size_t hidden_width(const ModelSpec& spec) {
  return spec.kind == ModelKind::perceptron ? spec.hidden : lnu_config(spec).output_width();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logicron: return "logicron";
    case ModelKind::logicron_neg: return "logicron_neg";
    case ModelKind::perceptron: return "perceptron";
  }
  return "?";
}

std::string_view to_string(HiddenActivation act) {
  switch (act) {
    case HiddenActivation::sigmoid: return "sigmoid";
    case HiddenActivation::relu: return "relu";
    case HiddenActivation::gelu: return "gelu";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "logicron") return ModelKind::logicron;
  if (text == "logicron_neg") return ModelKind::logicron_neg;
  if (text == "perceptron") return ModelKind::perceptron;
  throw ConfigError(fmt::format("unknown model kind '{}'", text));
}

HiddenActivation parse_activation(std::string_view text) {
  if (text == "sigmoid") return HiddenActivation::sigmoid;
  if (text == "relu") return HiddenActivation::relu;
  if (text == "gelu") return HiddenActivation::gelu;
  throw ConfigError(fmt::format("unknown activation '{}'", text));
}

void ModelSpec::validate() const {
  if (input_dim == 0 || hidden == 0) {
    throw ConfigError(fmt::format("model '{}': input_dim and hidden must be positive", name));
  }
  if (!(beta >= 0.0) || (trainable_beta && beta == 0.0)) {
    throw ConfigError(fmt::format("model '{}': invalid beta {}", name, beta));
  }
}

std::vector<ModelSpec> default_model_specs(std::size_t input_dim) {
  auto mlp = [&](std::string name, HiddenActivation act) {
    return ModelSpec{.name = std::move(name),
                     .kind = ModelKind::perceptron,
                     .input_dim = input_dim,
                     .hidden = 24,
                     .activation = act};
  };
  return {
      mlp("MLP-Sigmoid", HiddenActivation::sigmoid),
      mlp("MLP-ReLU", HiddenActivation::relu),
      mlp("MLP-GeLU", HiddenActivation::gelu),
      ModelSpec{.name = "Logicron", .kind = ModelKind::logicron, .input_dim = input_dim, .hidden = 11},
      ModelSpec{.name = "Logicron+Neg",
                .kind = ModelKind::logicron_neg,
                .input_dim = input_dim,
                .hidden = 9},
  };
}

Model Model::build(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Model m;
  m.spec_ = spec;
  Rng rng(seed);
  if (spec.kind == ModelKind::perceptron) {
    m.params_.push_back({"hidden.weight", dense_init(spec.input_dim, spec.input_dim, spec.hidden, rng)});
    if (spec.hidden_bias) {
      m.params_.push_back({"hidden.bias", dense_init(spec.input_dim, 1, spec.hidden, rng)});
    }
  } else {
    LnuParams lnu = LnuParams::init(lnu_config(spec), rng);
    m.params_.push_back({"lnu.w_and", std::move(lnu.w_and)});
    m.params_.push_back({"lnu.w_or", std::move(lnu.w_or)});
    if (lnu.config.include_negation) m.params_.push_back({"lnu.w_not", std::move(lnu.w_not)});
    if (lnu.config.trainable_beta) m.params_.push_back({"lnu.beta_raw", std::move(lnu.beta_raw)});
  }
  const std::size_t width = hidden_width(spec);
  m.params_.push_back({"head.weight", dense_init(width, width, 1, rng)});
  m.params_.push_back({"head.bias", dense_init(width, 1, 1, rng)});
  return m;
}

std::vector<NodeId> Model::bind(Graph& graph) const {
  std::vector<NodeId> ids;
  ids.reserve(params_.size());
  for (const auto& p : params_) ids.push_back(graph.parameter(p.value));
  return ids;
}

NodeId Model::forward(Graph& g, NodeId x, std::span<const NodeId> params) const {
  if (params.size() != params_.size()) {
    throw ConfigError(fmt::format("model '{}' has {} parameters, {} nodes given", spec_.name,
                                  params_.size(), params.size()));
  }
  std::size_t next = 0;
  NodeId hidden;
  if (spec_.kind == ModelKind::perceptron) {
    NodeId pre = g.matmul(x, params[next++]);
    if (spec_.hidden_bias) pre = g.add(pre, params[next++]);
    switch (spec_.activation) {
      case HiddenActivation::sigmoid: hidden = g.sigmoid(pre); break;
      case HiddenActivation::relu: hidden = g.relu(pre); break;
      case HiddenActivation::gelu: hidden = g.gelu(pre); break;
    }
  } else {
    const LnuConfig cfg = lnu_config(spec_);
    LnuNodes nodes{params[0], params[1], {}, {}};
    next = 2;
    if (cfg.include_negation) nodes.w_not = params[next++];
    if (cfg.trainable_beta) nodes.beta_raw = params[next++];
    hidden = lnu_forward(g, x, cfg, nodes);
  }
  const NodeId logit = g.add(g.matmul(hidden, params[next]), params[next + 1]);
  return g.sigmoid(logit);
}

Tensor Model::predict_proba(const Tensor& x) const {
  Graph g;
  std::vector<NodeId> ids;
  for (const auto& p : params_) ids.push_back(g.constant(p.value));
  return g.value(forward(g, g.constant(x), ids));
}

std::vector<bool> Model::predict(const Tensor& x) const {
  const Tensor p = predict_proba(x);
  std::vector<bool> out(p.rows());
  for (std::size_t i = 0; i < p.rows(); ++i) out[i] = p(i, 0) > 0.5;
  return out;
}

ParamCount count_params(const Model& model) {
  ParamCount c;
  for (const auto& p : model.parameters()) {
    c.by_component.emplace_back(p.name, p.value.size());
    c.total += p.value.size();
  }
  return c;
}

std::size_t expected_param_count(const ModelSpec& s) {
  const std::size_t d = s.input_dim;
  const std::size_t h = s.hidden;
  switch (s.kind) {
    case ModelKind::perceptron: return d * h + (s.hidden_bias ? h : 0) + h + 1;
    case ModelKind::logicron: return 2 * d * h + 2 * h + 1 + (s.trainable_beta ? 1 : 0);
    case ModelKind::logicron_neg: return 3 * d * h + 3 * h + 1 + (s.trainable_beta ? 1 : 0);
  }
  return 0;
}

std::string param_count_formula(const ModelSpec& s) {
  const std::size_t d = s.input_dim;
  const std::size_t h = s.hidden;
  const std::string beta = s.trainable_beta ? " + 1 (beta)" : "";
  switch (s.kind) {
    case ModelKind::perceptron:
      return s.hidden_bias
                 ? fmt::format("d*h + h + h + 1 = {}*{} + {} + {} + 1", d, h, h, h)
                 : fmt::format("d*h + h + 1 = {}*{} + {} + 1", d, h, h);
    case ModelKind::logicron:
      return fmt::format("2*d*o + 2*o + 1{} = 2*{}*{} + 2*{} + 1{}", beta, d, h, h, beta);
    case ModelKind::logicron_neg:
      return fmt::format("3*d*o + 3*o + 1{} = 3*{}*{} + 3*{} + 1{}", beta, d, h, h, beta);
  }
  return {};
}

nlohmann::json export_parameters(const Model& model) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& p : model.parameters()) {
    params[p.name] = {{"shape", {p.value.rows(), p.value.cols()}},
                      {"data", std::vector<double>(p.value.data().begin(), p.value.data().end())}};
  }
  return {{"model", model.spec().name}, {"kind", to_string(model.spec().kind)}, {"parameters", params}};
}

}  // namespace lnu
