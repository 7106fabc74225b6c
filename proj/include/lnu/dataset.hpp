#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lnu/formula.hpp"
#include "lnu/random.hpp"
#include "lnu/tensor.hpp"

namespace lnu {

/// Inputs uniform in [0,1]^d, labels from the formula on inputs binarized at
/// x > 0.5.
struct ToyDataset {
  Tensor inputs;
  std::vector<bool> labels;

  std::size_t size() const { return labels.size(); }
  /// Labels as an n x 1 tensor of 0/1.
  Tensor targets() const;
};

bool oracle_label(std::span<const double> row, const logic::Formula& formula);

ToyDataset sample_dataset(std::size_t n, const logic::Formula& formula, Rng& rng);

/// Train and test sets drawn one after the other from a generator seeded
/// with `seed`.
std::pair<ToyDataset, ToyDataset> generate_toy_data(std::size_t n_train, std::size_t n_test,
                                                    std::uint64_t seed,
                                                    const logic::Formula& formula);

double accuracy(const std::vector<bool>& predicted, const std::vector<bool>& labels);

}  // namespace lnu
