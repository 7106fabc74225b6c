#include "lnu/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace lnu {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"task", {"formula", "n_train", "n_test"}},
    {"train", {"epochs", "seeds", "seed_base", "lr", "beta1", "beta2", "eps"}},
    {"models",
     {"include", "perceptron_hidden", "perceptron_hidden_bias", "logicron_units", "logicron_neg_units",
      "beta", "trainable_beta"}},
    {"boundary", {"resolution", "betas", "svg"}},
    {"output", {"dir"}},
};

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  const std::string raw = boost::trim_copy(node->data());
  if constexpr (std::is_same_v<T, std::string>) {
    return raw;
  } else if constexpr (std::is_same_v<T, bool>) {
    const std::string v = boost::to_lower_copy(raw);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, raw));
  } else {
    std::istringstream in(raw);
    T value{};
    if constexpr (std::is_unsigned_v<T>) {
      if (!raw.empty() && raw.front() == '-') {
        throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, raw));
      }
    }
    if (!(in >> value) || !(in >> std::ws).eof()) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", key, raw));
    }
    return value;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::istringstream in(item);
    double v = 0.0;
    if (!(in >> v) || !(in >> std::ws).eof()) throw ConfigError(fmt::format("not a number: '{}'", item));
    out.push_back(v);
  }
  return out;
}

std::vector<ModelSpec> make_model_specs(const std::vector<std::string>& include, std::size_t input_dim,
                                        std::size_t perceptron_hidden, bool perceptron_hidden_bias,
                                        std::size_t logicron_units, std::size_t logicron_neg_units,
                                        double beta, bool trainable_beta) {
  auto all = default_model_specs(input_dim);
  for (auto& s : all) {
    s.beta = beta;
    s.trainable_beta = trainable_beta;
    switch (s.kind) {
      case ModelKind::perceptron:
        s.hidden = perceptron_hidden;
        s.hidden_bias = perceptron_hidden_bias;
        break;
      case ModelKind::logicron: s.hidden = logicron_units; break;
      case ModelKind::logicron_neg: s.hidden = logicron_neg_units; break;
    }
  }
  std::vector<ModelSpec> out;
  for (const auto& name : include) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const ModelSpec& s) { return s.name == name; });
    if (it == all.end()) throw ConfigError(fmt::format("unknown model '{}'", name));
    out.push_back(*it);
    out.back().validate();
  }
  return out;
}

void ExperimentConfig::validate() const {
  train.validate();
  if (models.empty()) throw ConfigError("no models selected");
  for (const auto& m : models) {
    m.validate();
    if (m.input_dim != train.formula.arity()) {
      throw ConfigError(fmt::format("model '{}' expects {} inputs, formula has {}", m.name, m.input_dim,
                                    train.formula.arity()));
    }
  }
  if (resolution < 2) throw ConfigError(fmt::format("grid resolution must be >= 2, got {}", resolution));
  for (double b : betas) {
    if (!(b >= 0.0)) throw ConfigError(fmt::format("beta must be >= 0, got {}", b));
  }
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    const auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end() || body.data().size() > 0) {
      throw ConfigError(fmt::format("unknown config section or top-level key '{}'", section));
    }
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) throw ConfigError(fmt::format("unknown config key '{}.{}'", section, key));
    }
  }

  ExperimentConfig cfg;
  TrainConfig& t = cfg.train;
  const auto formula_text = get<std::string>(tree, "task.formula", "");
  if (!formula_text.empty()) t.formula = logic::parse_formula(formula_text);
  t.n_train = get(tree, "task.n_train", t.n_train);
  t.n_test = get(tree, "task.n_test", t.n_test);

  t.epochs = get(tree, "train.epochs", t.epochs);
  const auto n_seeds = get<std::size_t>(tree, "train.seeds", t.seeds.size());
  t.seeds = TrainConfig::default_seeds(n_seeds, get<std::uint64_t>(tree, "train.seed_base", 0));
  t.adam.lr = get(tree, "train.lr", t.adam.lr);
  t.adam.beta1 = get(tree, "train.beta1", t.adam.beta1);
  t.adam.beta2 = get(tree, "train.beta2", t.adam.beta2);
  t.adam.eps = get(tree, "train.eps", t.adam.eps);

  const auto include = split_list(
      get<std::string>(tree, "models.include", "MLP-Sigmoid,MLP-ReLU,MLP-GeLU,Logicron,Logicron+Neg"));
  cfg.models = make_model_specs(include, t.formula.arity(), get<std::size_t>(tree, "models.perceptron_hidden", 24),
                                get(tree, "models.perceptron_hidden_bias", false),
                                get<std::size_t>(tree, "models.logicron_units", 11),
                                get<std::size_t>(tree, "models.logicron_neg_units", 9),
                                get(tree, "models.beta", 10.0), get(tree, "models.trainable_beta", true));

  cfg.resolution = get(tree, "boundary.resolution", cfg.resolution);
  const auto betas = get<std::string>(tree, "boundary.betas", "");
  if (!betas.empty()) cfg.betas = parse_double_list(betas);
  cfg.svg = get(tree, "boundary.svg", cfg.svg);
  cfg.out_dir = get<std::string>(tree, "output.dir", cfg.out_dir.string());

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace lnu
