#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lnu/tensor.hpp"

namespace lnu::logic {

/// Gating temperature for soft AND/OR. Zero is uniform averaging; large
/// values approach hard min/max.
class Sharpness {
 public:
  explicit Sharpness(double beta);
  double value() const { return beta_; }

 private:
  double beta_;
};

// Goedel t-norm / t-conorm.
double godel_and(std::span<const double> z);
double godel_or(std::span<const double> z);

/// sum_i softmin(beta z)_i * z_i, with softmin(beta z) = softmax(-beta z).
double soft_and(std::span<const double> z, Sharpness beta);
/// sum_i softmax(beta z)_i * z_i
double soft_or(std::span<const double> z, Sharpness beta);

/// z_i = x_i * w_i
std::vector<double> weighted_gate(std::span<const double> x, std::span<const double> w);

enum class NegationMode { affine, learned };

/// affine: 1 - x. learned: 1 - sigmoid(w_not * x); requires `w_not`.
double soft_not(double x, NegationMode mode = NegationMode::affine,
                std::optional<double> w_not = std::nullopt);

/// Per coordinate: soft_or((1 - a_k, b_k), beta).
std::vector<double> soft_imply(std::span<const double> a, std::span<const double> b,
                               Sharpness beta);

// Product-form weighted operators:
//   and = prod_i [1 - w_i (1 - x_i)],  or = 1 - prod_i [1 - w_i x_i]
double nln_and(std::span<const double> x, std::span<const double> w);
double nln_or(std::span<const double> x, std::span<const double> w);

/// Output squashing for the sum-form operators. `clamp` clips to [0, 1];
/// `relu` is max(0, v) with no upper cap.
enum class LnnActivation { clamp, relu };

// Sum-form weighted operators with bias b:
//   and = f(b - sum_i w_i (1 - x_i)),  or = f(1 - b + sum_i w_i x_i)
// Weights and bias must be nonnegative.
double lnn_and(std::span<const double> x, std::span<const double> w, double bias_b,
               LnnActivation f = LnnActivation::clamp);
double lnn_or(std::span<const double> x, std::span<const double> w, double bias_b,
              LnnActivation f = LnnActivation::clamp);

}  // namespace lnu::logic
