#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lnu/models.hpp"
#include "lnu/training.hpp"

namespace lnu {

/// Everything the command-line tool needs. Defaults reproduce the toy task:
///
///   [task]     formula = (x1 | x2) & !x3, n_train = 20, n_test = 200
///   [train]    epochs = 30, seeds = 20, seed_base = 0,
///              lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8
///   [models]   include = MLP-Sigmoid,MLP-ReLU,MLP-GeLU,Logicron,Logicron+Neg
///              perceptron_hidden = 24, perceptron_hidden_bias = false,
///              logicron_units = 11, logicron_neg_units = 9,
///              beta = 10, trainable_beta = true
///   [boundary] resolution = 101, betas = 1,10,100, svg = false
///   [output]   dir = results
struct ExperimentConfig {
  TrainConfig train;
  std::vector<ModelSpec> models = default_model_specs();
  std::size_t resolution = 101;
  std::vector<double> betas{1.0, 10.0, 100.0};
  bool svg = false;
  std::filesystem::path out_dir = "results";

  void validate() const;
};

/// INI-style text: "[section]" headers and "key = value" lines, "#" or ";"
/// comments. Unknown sections or keys are a ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Rebuilds the model list after hidden sizes, beta or the input width change.
std::vector<ModelSpec> make_model_specs(const std::vector<std::string>& include, std::size_t input_dim,
                                        std::size_t perceptron_hidden, bool perceptron_hidden_bias,
                                        std::size_t logicron_units, std::size_t logicron_neg_units,
                                        double beta, bool trainable_beta);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace lnu
