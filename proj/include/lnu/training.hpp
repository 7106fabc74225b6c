#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lnu/dataset.hpp"
#include "lnu/formula.hpp"
#include "lnu/models.hpp"

namespace lnu {

struct AdamConfig {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const AdamConfig& config, std::span<const Parameter> params);
  void step(std::span<Parameter> params, std::span<const Tensor> grads);

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::size_t t_ = 0;
};

struct TrainConfig {
  std::size_t epochs = 30;
  AdamConfig adam;
  std::vector<std::uint64_t> seeds = default_seeds(20);
  std::size_t n_train = 20;
  std::size_t n_test = 200;
  logic::Formula formula = logic::toy_formula();

  static std::vector<std::uint64_t> default_seeds(std::size_t count, std::uint64_t base = 0);
  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_accuracy = 0.0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double test_loss = 0.0;
};

struct RunResult {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t param_count = 0;
  std::vector<EpochMetrics> epochs;
  /// Set when the training loss became non-finite; updates stop from that
  /// epoch on but metrics keep being recorded.
  std::optional<std::size_t> diverged_at;
};

/// Full-batch Adam on BCE; one optimizer step per epoch, metrics recorded
/// after each step.
RunResult train(Model& model, const ToyDataset& train_set, const ToyDataset& test_set,
                const TrainConfig& config);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // unbiased sample standard deviation
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

struct ModelAggregate {
  std::string model;
  std::size_t param_count = 0;
  std::size_t runs = 0;
  std::size_t diverged_runs = 0;
  /// Runs at 100% train accuracy in the final epoch.
  std::size_t perfect_train_runs = 0;
  std::vector<Summary> train_accuracy;
  std::vector<Summary> test_accuracy;
  std::vector<Summary> train_loss;
  std::vector<Summary> test_loss;
};

struct AggregateResult {
  std::vector<RunResult> runs;
  std::vector<ModelAggregate> models;

  const ModelAggregate& model(std::string_view name) const;
};

/// Groups runs by model name (in first-seen order) and reduces each epoch
/// across seeds.
std::vector<ModelAggregate> aggregate(std::span<const RunResult> runs);

/// For each seed: fresh data from `seed`, every model initialised from
/// derive_seed(seed, model index).
AggregateResult run_multi_seed(std::span<const ModelSpec> specs, const TrainConfig& config);

}  // namespace lnu
