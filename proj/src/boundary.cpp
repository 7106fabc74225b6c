#include "lnu/boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "lnu/soft_logic.hpp"

namespace lnu {

UnitKind parse_unit_kind(std::string_view text) {
  if (text == "hard_and") return UnitKind::hard_and;
  if (text == "hard_or") return UnitKind::hard_or;
  if (text == "lnu_and") return UnitKind::lnu_and;
  if (text == "lnu_or") return UnitKind::lnu_or;
  if (text == "inner_relu") return UnitKind::inner_relu;
  throw ConfigError(fmt::format("unknown unit kind '{}'", text));
}

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::hard_and: return "hard_and";
    case UnitKind::hard_or: return "hard_or";
    case UnitKind::lnu_and: return "lnu_and";
    case UnitKind::lnu_or: return "lnu_or";
    case UnitKind::inner_relu: return "inner_relu";
  }
  return "?";
}

double UnitSpec::evaluate(double x1, double x2) const {
  const std::array<double, 2> x{x1, x2};
  const std::array<double, 2> w{weight, weight};
  switch (kind) {
    case UnitKind::hard_and: return (x1 > 0.5 && x2 > 0.5) ? 1.0 : 0.0;
    case UnitKind::hard_or: return (x1 > 0.5 || x2 > 0.5) ? 1.0 : 0.0;
    case UnitKind::lnu_and: return logic::soft_and(logic::weighted_gate(x, w), logic::Sharpness(beta));
    case UnitKind::lnu_or: return logic::soft_or(logic::weighted_gate(x, w), logic::Sharpness(beta));
    case UnitKind::inner_relu: return std::max(0.0, weight * x1 + weight * x2 + bias);
  }
  throw ConfigError("unknown unit kind");
}

std::string UnitSpec::label() const {
  switch (kind) {
    case UnitKind::hard_and:
    case UnitKind::hard_or: return std::string(to_string(kind));
    case UnitKind::lnu_and:
    case UnitKind::lnu_or: return fmt::format("{}_beta{:g}", to_string(kind), beta);
    case UnitKind::inner_relu: return fmt::format("inner_relu_bias{:g}", bias);
  }
  return {};
}

BoundaryGrid decision_boundary_grid(const UnitSpec& unit, std::size_t resolution) {
  if (resolution < 2) throw ConfigError(fmt::format("grid resolution must be >= 2, got {}", resolution));
  BoundaryGrid grid{unit, resolution, Tensor(resolution, resolution)};
  for (std::size_t i = 0; i < resolution; ++i)
    for (std::size_t j = 0; j < resolution; ++j)
      grid.values(i, j) = unit.evaluate(grid.coordinate(j), grid.coordinate(i));
  return grid;
}

std::vector<UnitSpec> default_boundary_units(std::span<const double> betas) {
  std::vector<UnitSpec> units{{UnitKind::hard_and}, {UnitKind::hard_or}};
  for (UnitKind k : {UnitKind::lnu_and, UnitKind::lnu_or}) {
    for (double b : betas) units.push_back({k, b, 0.5, 0.0});
  }
  units.push_back({UnitKind::inner_relu, 0.0, 0.5, 0.0});
  units.push_back({UnitKind::inner_relu, 0.0, 0.5, -0.5});
  return units;
}

namespace {

void require_same_grid(const BoundaryGrid& a, const BoundaryGrid& b) {
  if (a.resolution != b.resolution) throw ShapeError("boundary grids have different resolutions");
}

}  // namespace

double threshold_agreement(const BoundaryGrid& soft, const BoundaryGrid& hard, double tau,
                           double band) {
  require_same_grid(soft, hard);
  std::size_t compared = 0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < soft.resolution; ++i) {
    if (std::abs(soft.coordinate(i) - 0.5) <= band) continue;
    for (std::size_t j = 0; j < soft.resolution; ++j) {
      if (std::abs(soft.coordinate(j) - 0.5) <= band) continue;
      ++compared;
      agree += (soft.values(i, j) > tau) == (hard.values(i, j) > 0.5);
    }
  }
  return compared == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(compared);
}

double mean_abs_deviation(const BoundaryGrid& a, const BoundaryGrid& b) {
  require_same_grid(a, b);
  double total = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) total += std::abs(a.values[k] - b.values[k]);
  return total / static_cast<double>(a.values.size());
}

}  // namespace lnu
