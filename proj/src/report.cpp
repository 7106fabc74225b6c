#include "lnu/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lnu {

namespace {

nlohmann::json to_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

nlohmann::json per_epoch(const std::vector<Summary>& series) {
  nlohmann::json mean = nlohmann::json::array();
  nlohmann::json std = nlohmann::json::array();
  for (const auto& s : series) {
    mean.push_back(s.mean);
    std.push_back(s.std);
  }
  return {{"mean", mean}, {"std", std}};
}

}  // namespace

void write_runs_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "model,seed,epoch,split,accuracy,loss\n";
  for (const auto& run : runs) {
    for (const auto& e : run.epochs) {
      fmt::print(out, "{},{},{},train,{:.17g},{:.17g}\n", run.model, run.seed, e.epoch,
                 e.train_accuracy, e.train_loss);
      fmt::print(out, "{},{},{},test,{:.17g},{:.17g}\n", run.model, run.seed, e.epoch,
                 e.test_accuracy, e.test_loss);
    }
  }
}

nlohmann::json summary_json(const AggregateResult& result, const TrainConfig& config) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : result.models) {
    models.push_back({
        {"model", m.model},
        {"param_count", m.param_count},
        {"runs", m.runs},
        {"diverged_runs", m.diverged_runs},
        {"perfect_train_runs", m.perfect_train_runs},
        {"final",
         {{"train_accuracy", to_json(m.train_accuracy.back())},
          {"test_accuracy", to_json(m.test_accuracy.back())},
          {"train_loss", to_json(m.train_loss.back())},
          {"test_loss", to_json(m.test_loss.back())}}},
        {"per_epoch",
         {{"train_accuracy", per_epoch(m.train_accuracy)},
          {"test_accuracy", per_epoch(m.test_accuracy)},
          {"train_loss", per_epoch(m.train_loss)},
          {"test_loss", per_epoch(m.test_loss)}}},
    });
  }
  nlohmann::json diverged = nlohmann::json::array();
  for (const auto& r : result.runs) {
    if (r.diverged_at) diverged.push_back({{"model", r.model}, {"seed", r.seed}, {"epoch", *r.diverged_at}});
  }
  return {
      {"config",
       {{"formula", config.formula.to_string()},
        {"epochs", config.epochs},
        {"seeds", config.seeds},
        {"n_train", config.n_train},
        {"n_test", config.n_test},
        {"optimizer",
         {{"name", "adam"},
          {"lr", config.adam.lr},
          {"beta1", config.adam.beta1},
          {"beta2", config.adam.beta2},
          {"eps", config.adam.eps}}}}},
      {"models", models},
      {"diverged", diverged},
  };
}

std::optional<std::size_t> param_target(ModelKind kind) {
  switch (kind) {
    case ModelKind::perceptron: return 97;
    case ModelKind::logicron: return 90;
    case ModelKind::logicron_neg: return 110;
  }
  return std::nullopt;
}

const char* const kParamReconciliation =
    "Reference sizes 97 / 90 / 110 cannot come from a literal single hidden unit on 3 inputs.\n"
    "They are read as a single hidden layer: perceptrons use h = 24 units without hidden bias\n"
    "(3*24 + 24 + 1 = 97), Logicron uses o = 11 units per branch with a trainable beta\n"
    "(2*3*11 + 2*11 + 1 + 1 = 90) and Logicron+Neg uses o = 9 (3*3*9 + 3*9 + 1 + 1 = 110).\n";

std::string format_accuracy_table(const AggregateResult& result) {
  std::string out = fmt::format("{:<14} {:>6} {:>18} {:>18} {:>9} {:>8}\n", "model", "params",
                                "train acc (%)", "test acc (%)", "100% trn", "diverged");
  for (const auto& m : result.models) {
    const Summary& tr = m.train_accuracy.back();
    const Summary& te = m.test_accuracy.back();
    out += fmt::format("{:<14} {:>6} {:>18} {:>18} {:>9} {:>8}\n", m.model, m.param_count,
                       fmt::format("{:.1f} +- {:.1f}", 100 * tr.mean, 100 * tr.std),
                       fmt::format("{:.1f} +- {:.1f}", 100 * te.mean, 100 * te.std),
                       fmt::format("{}/{}", m.perfect_train_runs, m.runs), m.diverged_runs);
  }
  return out;
}

std::string format_param_table(std::span<const ModelSpec> specs) {
  std::string out = fmt::format("{:<14} {:>6} {:>6} {:>8}  {}\n", "model", "params", "target",
                                "offset", "formula");
  for (const auto& spec : specs) {
    const std::size_t n = expected_param_count(spec);
    const auto target = param_target(spec.kind);
    const std::string offset =
        target ? fmt::format("{:+.1f}%", 100.0 * (static_cast<double>(n) - static_cast<double>(*target)) /
                                             static_cast<double>(*target))
               : "-";
    out += fmt::format("{:<14} {:>6} {:>6} {:>8}  {}\n", spec.name, n,
                       target ? std::to_string(*target) : "-", offset, param_count_formula(spec));
  }
  return out + "\n" + kParamReconciliation;
}

void write_grid_csv(std::ostream& out, const BoundaryGrid& grid) {
  for (std::size_t i = 0; i < grid.resolution; ++i) {
    for (std::size_t j = 0; j < grid.resolution; ++j) {
      if (j > 0) out << ',';
      fmt::print(out, "{:.17g}", grid.values(i, j));
    }
    out << '\n';
  }
}

void write_grid_svg(std::ostream& out, const BoundaryGrid& grid) {
  constexpr int kLow[3] = {0xf7, 0xfb, 0xff};
  constexpr int kHigh[3] = {0x08, 0x30, 0x6b};
  constexpr int kCell = 4;
  const std::size_t r = grid.resolution;
  const std::size_t side = r * kCell;
  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
             "viewBox=\"0 0 {0} {1}\" shape-rendering=\"crispEdges\">\n",
             side, side + 20);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double t = std::clamp(grid.values(i, j), 0.0, 1.0);
      int rgb[3];
      for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(kLow[c] + t * (kHigh[c] - kLow[c])));
      fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#{:02x}{:02x}{:02x}\"/>\n",
                 j * kCell, (r - 1 - i) * kCell, kCell, kCell, rgb[0], rgb[1], rgb[2]);
    }
  }
  fmt::print(out, "<text x=\"2\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n</svg>\n",
             side + 15, grid.unit.label());
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(),
                              ec ? ec.message() : "not a directory"));
  }
  const auto probe = dir / ".write_test";
  {
    std::ofstream f(probe);
    if (!f) throw IoError(fmt::format("output directory {} is not writable", dir.string()));
  }
  std::filesystem::remove(probe, ec);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& out) { out << text; });
}

}  // namespace lnu
