#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lnu/graph.hpp"

namespace lnu {

/// Builds a scalar (1x1) loss from parameter nodes registered on `graph`.
using ScalarGraphFn = std::function<NodeId(Graph& graph, std::span<const NodeId> params)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t param_index = 0;
  std::size_t coordinate = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
double relative_error(double analytic, double numeric);

/// Compares reverse-mode gradients of `fn` against the fourth-order central
/// difference
///   (8 (f(t + h) - f(t - h)) - (f(t + 2h) - f(t - 2h))) / 12h
/// one coordinate at a time. Inputs must stay differentiable within 2h.
GradCheckReport finite_difference_check(const ScalarGraphFn& fn, std::span<const Tensor> params,
                                        double h = 1e-4);

}  // namespace lnu
