#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "lnu/boundary.hpp"
#include "lnu/models.hpp"
#include "lnu/training.hpp"

namespace lnu {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Long format, one line per (model, seed, epoch, split):
///   model,seed,epoch,split,accuracy,loss
/// split is "train" or "test"; epochs are 1-based; reals use %.17g.
void write_runs_csv(std::ostream& out, std::span<const RunResult> runs);

/// Per model: parameter count, divergent and perfect-train runs, and the
/// per-epoch mean/std/min/max of every metric.
nlohmann::json summary_json(const AggregateResult& result, const TrainConfig& config);

/// Reference sizes the default models are matched against.
std::optional<std::size_t> param_target(ModelKind kind);

/// Explains why a single hidden layer (not a single unit) is used to reach
/// the reference parameter counts.
extern const char* const kParamReconciliation;

/// Final-epoch accuracy, mean +- std over seeds, one row per model.
std::string format_accuracy_table(const AggregateResult& result);

/// Counts, closed-form formulas and relative distance to the reference
/// sizes, followed by the reconciliation note.
std::string format_param_table(std::span<const ModelSpec> specs);

/// r rows of r comma-separated values; row i is x2 = i / (r - 1), column j is
/// x1 = j / (r - 1).
void write_grid_csv(std::ostream& out, const BoundaryGrid& grid);

/// Heatmap with x1 to the right and x2 upwards. Values are clamped to [0, 1]
/// and mapped linearly from #f7fbff (0) to #08306b (1).
void write_grid_svg(std::ostream& out, const BoundaryGrid& grid);

/// Creates `dir` if needed; throws IoError if it cannot be written to.
void prepare_output_dir(const std::filesystem::path& dir);

/// Writes through `fn` into `path`, throwing IoError on any stream failure.
template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lnu
