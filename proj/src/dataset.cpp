#include "lnu/dataset.hpp"

namespace lnu {

Tensor ToyDataset::targets() const {
  Tensor t(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) t(i, 0) = labels[i] ? 1.0 : 0.0;
  return t;
}

bool oracle_label(std::span<const double> row, const logic::Formula& formula) {
  std::vector<bool> bits(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) bits[j] = row[j] > 0.5;
  return logic::hard_eval(formula, bits);
}

ToyDataset sample_dataset(std::size_t n, const logic::Formula& formula, Rng& rng) {
  if (n == 0) throw ValidationError("dataset size must be >= 1");
  const std::size_t d = formula.arity();
  ToyDataset ds{Tensor(n, d), std::vector<bool>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.inputs(i, j) = rng.uniform();
    ds.labels[i] = oracle_label(ds.inputs.row(i), formula);
  }
  return ds;
}

std::pair<ToyDataset, ToyDataset> generate_toy_data(std::size_t n_train, std::size_t n_test,
                                                    std::uint64_t seed,
                                                    const logic::Formula& formula) {
  Rng rng(seed);
  ToyDataset train = sample_dataset(n_train, formula, rng);
  ToyDataset test = sample_dataset(n_test, formula, rng);
  return {std::move(train), std::move(test)};
}

double accuracy(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
  if (predicted.size() != labels.size() || labels.empty()) {
    throw ShapeError("accuracy: prediction/label size mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace lnu
