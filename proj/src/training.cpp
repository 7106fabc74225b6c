#include "lnu/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "lnu/random.hpp"

namespace lnu {

Adam::Adam(const AdamConfig& config, std::span<const Parameter> params) : config_(config) {
  if (!(config.lr > 0.0)) throw ConfigError("Adam learning rate must be positive");
  for (const auto& p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void Adam::step(std::span<Parameter> params, std::span<const Tensor> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("Adam::step: parameter/gradient count mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = params[p].value;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double g = grads[p][i];
      m_[p][i] = config_.beta1 * m_[p][i] + (1.0 - config_.beta1) * g;
      v_[p][i] = config_.beta2 * v_[p][i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m_[p][i] / c1;
      const double v_hat = v_[p][i] / c2;
      w[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

std::vector<std::uint64_t> TrainConfig::default_seeds(std::size_t count, std::uint64_t base) {
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), base);
  return seeds;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (seeds.size() < 2) throw ConfigError("at least 2 seeds are needed for a standard deviation");
  if (n_train < 1 || n_test < 1) throw ConfigError("dataset sizes must be >= 1");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

namespace {

struct Evaluation {
  double accuracy;
  double loss;
};

Evaluation evaluate(const Model& model, const ToyDataset& data) {
  Graph g;
  std::vector<NodeId> ids;
  for (const auto& p : model.parameters()) ids.push_back(g.constant(p.value));
  const NodeId prob = model.forward(g, g.constant(data.inputs), ids);
  const double loss = g.value(g.bce_loss(prob, data.targets())).item();
  const Tensor& p = g.value(prob);
  std::vector<bool> predicted(p.rows());
  for (std::size_t i = 0; i < p.rows(); ++i) predicted[i] = p(i, 0) > 0.5;
  return {accuracy(predicted, data.labels), loss};
}

}  // namespace

RunResult train(Model& model, const ToyDataset& train_set, const ToyDataset& test_set,
                const TrainConfig& config) {
  if (train_set.inputs.cols() != model.spec().input_dim) {
    throw ShapeError(fmt::format("model '{}' expects {} inputs, data has {}", model.spec().name,
                                 model.spec().input_dim, train_set.inputs.cols()));
  }
  RunResult result;
  result.model = model.spec().name;
  result.param_count = count_params(model).total;

  Adam optimizer(config.adam, model.parameters());
  const Tensor targets = train_set.targets();
  std::vector<Tensor> grads;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (!result.diverged_at) {
      Graph g;
      const auto ids = model.bind(g);
      const NodeId loss = g.bce_loss(model.forward(g, g.constant(train_set.inputs), ids), targets);
      g.backward(loss);
      grads.clear();
      bool finite = std::isfinite(g.value(loss).item());
      for (NodeId id : ids) {
        grads.push_back(g.grad(id));
        finite = finite && grads.back().all_finite();
      }
      if (finite) {
        optimizer.step(model.parameters(), grads);
      } else {
        result.diverged_at = epoch;
      }
    }
    const Evaluation tr = evaluate(model, train_set);
    const Evaluation te = evaluate(model, test_set);
    result.epochs.push_back({epoch, tr.accuracy, tr.loss, te.accuracy, te.loss});
  }
  return result;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw ValidationError("summarize: no values");
  Summary s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

const ModelAggregate& AggregateResult::model(std::string_view name) const {
  for (const auto& m : models) {
    if (m.model == name) return m;
  }
  throw std::out_of_range(fmt::format("no aggregate for model '{}'", name));
}

std::vector<ModelAggregate> aggregate(std::span<const RunResult> runs) {
  std::vector<std::string> order;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.model) == order.end()) order.push_back(r.model);
  }
  std::vector<ModelAggregate> out;
  for (const auto& name : order) {
    std::vector<const RunResult*> group;
    for (const auto& r : runs) {
      if (r.model == name) group.push_back(&r);
    }
    ModelAggregate agg;
    agg.model = name;
    agg.param_count = group.front()->param_count;
    agg.runs = group.size();
    const std::size_t epochs = group.front()->epochs.size();
    for (const RunResult* r : group) {
      if (r->epochs.size() != epochs) throw ShapeError("aggregate: runs have different epoch counts");
      agg.diverged_runs += r->diverged_at.has_value();
      agg.perfect_train_runs += !r->epochs.empty() && r->epochs.back().train_accuracy == 1.0;
    }
    auto series = [&](auto member) {
      std::vector<Summary> s;
      std::vector<double> column(group.size());
      for (std::size_t e = 0; e < epochs; ++e) {
        for (std::size_t k = 0; k < group.size(); ++k) column[k] = group[k]->epochs[e].*member;
        s.push_back(summarize(column));
      }
      return s;
    };
    agg.train_accuracy = series(&EpochMetrics::train_accuracy);
    agg.test_accuracy = series(&EpochMetrics::test_accuracy);
    agg.train_loss = series(&EpochMetrics::train_loss);
    agg.test_loss = series(&EpochMetrics::test_loss);
    out.push_back(std::move(agg));
  }
  return out;
}

AggregateResult run_multi_seed(std::span<const ModelSpec> specs, const TrainConfig& config) {
  config.validate();
  if (specs.empty()) throw ConfigError("no models to train");
  for (const auto& s : specs) {
    if (s.input_dim != config.formula.arity()) {
      throw ConfigError(fmt::format("model '{}' has input_dim {}, task formula has {} variables",
                                    s.name, s.input_dim, config.formula.arity()));
    }
  }
  AggregateResult result;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    for (std::uint64_t seed : config.seeds) {
      const auto [train_set, test_set] =
          generate_toy_data(config.n_train, config.n_test, seed, config.formula);
      Model model = Model::build(specs[m], derive_seed(seed, m));
      RunResult run = train(model, train_set, test_set, config);
      run.seed = seed;
      result.runs.push_back(std::move(run));
    }
  }
  result.models = aggregate(result.runs);
  return result;
}

}  // namespace lnu
