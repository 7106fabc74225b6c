#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lnu/gradcheck.hpp"
#include "lnu/random.hpp"

namespace lnu {

enum class LogicOp { godel_and, godel_or, nln_and, nln_or, lnn_and, lnn_or, soft_and, soft_or };

std::string_view to_string(LogicOp op);
std::vector<LogicOp> all_logic_ops();
bool is_conjunction(LogicOp op);

/// Operator applied with unit weights (bias_b = 1 for the sum form).
double apply_logic_op(LogicOp op, std::span<const double> x, double beta);

struct TruthTableRow {
  std::string op;
  std::size_t arity = 0;
  double max_deviation = 0.0;
};

/// Evaluates each operator at all 2^arity Boolean corners and reports the
/// largest deviation from the classical AND/OR truth table.
std::vector<TruthTableRow> truth_table_sweep(std::span<const LogicOp> ops, std::size_t arity,
                                             double beta = 100.0);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

nlohmann::json to_json(std::span<const CheckResult> results);

/// De Morgan duality, convex hull, sharp limit, beta = 0 mean reduction,
/// permutation invariance and truth-table fidelity.
std::vector<CheckResult> run_logic_checks(std::uint64_t seed = 7);

/// One gradient check at a random point drawn from `rng`.
struct GradCheckCase {
  std::string name;
  std::function<GradCheckReport(Rng&)> run;
};

/// Every differentiable graph op plus the LNU layer, a depth-3 LNU stack
/// with soft-imply residuals and all five toy-task models.
std::vector<GradCheckCase> standard_gradcheck_cases();

/// Runs each case at `points` random points; value is the max relative
/// error over points, passing when <= `tolerance`.
std::vector<CheckResult> run_gradchecks(std::span<const GradCheckCase> cases, std::size_t points,
                                        std::uint64_t seed, double tolerance = 1e-4);

}  // namespace lnu
