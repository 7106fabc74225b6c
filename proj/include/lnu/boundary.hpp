#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lnu/tensor.hpp"

namespace lnu {

enum class UnitKind { hard_and, hard_or, lnu_and, lnu_or, inner_relu };

UnitKind parse_unit_kind(std::string_view text);
std::string_view to_string(UnitKind kind);

/// A single two-input computation unit.
///   hard_*     Boolean AND/OR of (x1 > 0.5, x2 > 0.5)
///   lnu_*      soft AND/OR of (w x1, w x2) at sharpness beta
///   inner_relu relu(w x1 + w x2 + bias)
struct UnitSpec {
  UnitKind kind = UnitKind::hard_and;
  double beta = 100.0;
  double weight = 0.5;
  double bias = 0.0;

  double evaluate(double x1, double x2) const;
  /// File-name friendly, e.g. "lnu_and_beta100".
  std::string label() const;
};

/// values(i, j) is the unit at x1 = j / (r - 1), x2 = i / (r - 1).
struct BoundaryGrid {
  UnitSpec unit;
  std::size_t resolution = 0;
  Tensor values;

  double coordinate(std::size_t index) const {
    return static_cast<double>(index) / static_cast<double>(resolution - 1);
  }
};

BoundaryGrid decision_boundary_grid(const UnitSpec& unit, std::size_t resolution);

/// Hard AND/OR, LNU AND/OR at each beta (w = 0.5), inner-product ReLU with
/// bias 0 and -0.5 (w = 0.5).
std::vector<UnitSpec> default_boundary_units(std::span<const double> betas);

/// Fraction of cells where (soft > tau) matches (hard > 0.5), skipping cells
/// within `band` of x1 = 0.5 or x2 = 0.5.
double threshold_agreement(const BoundaryGrid& soft, const BoundaryGrid& hard, double tau,
                           double band);

double mean_abs_deviation(const BoundaryGrid& a, const BoundaryGrid& b);

}  // namespace lnu
