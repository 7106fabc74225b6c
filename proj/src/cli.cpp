#include "lnu/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"

#include "lnu/boundary.hpp"
#include "lnu/report.hpp"

namespace lnu::cli {

namespace {

constexpr const char* kFooter = R"(Exit codes: 0 success, 1 verification failure, 2 configuration or output error.

Output files (all CSV files are comma separated, reals printed with %.17g):
  train     runs.csv       header: model,seed,epoch,split,accuracy,loss
                           split is train|test, epoch is 1-based, one row per
                           (model, seed, epoch, split)
            summary.json   per model: param_count, runs, diverged_runs,
                           perfect_train_runs, final and per-epoch statistics
            params.txt     parameter counts, formulas, reference sizes
  boundary  grid_<unit>.csv  r lines of r values, no header; line i is
                           x2 = i/(r-1), column j is x1 = j/(r-1)
            grid_<unit>.svg  with --svg; x1 right, x2 up, value 0 -> #f7fbff,
                           1 -> #08306b, linear, clamped to [0, 1]
            boundary.csv   header: unit,max_abs_dev,mean_abs_dev,agreement
  logic-checks  logic_checks.json with --out
)";

void print_checks(std::ostream& out, std::span<const CheckResult> checks) {
  for (const auto& c : checks) {
    fmt::print(out, "{:<44} {:>12.3e} <= {:<8.1e} {}\n", c.name, c.value, c.threshold,
               c.passed ? "ok" : "FAIL");
  }
}

bool all_passed(std::span<const CheckResult> checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace

int cmd_train(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  prepare_output_dir(config.out_dir);
  const auto start = std::chrono::steady_clock::now();
  const AggregateResult result = run_multi_seed(config.models, config.train);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_file(config.out_dir / "runs.csv", [&](std::ostream& f) { write_runs_csv(f, result.runs); });
  write_text_file(config.out_dir / "summary.json", summary_json(result, config.train).dump(2) + "\n");
  const std::string params = format_param_table(config.models);
  write_text_file(config.out_dir / "params.txt", params);

  fmt::print(out, "{}\n", params);
  fmt::print(out, "epoch {} over {} seeds ({} train / {} test samples, {:.1f} s):\n",
             config.train.epochs, config.train.seeds.size(), config.train.n_train, config.train.n_test, seconds);
  out << format_accuracy_table(result);
  for (const auto& r : result.runs) {
    if (r.diverged_at) fmt::print(out, "warning: {} seed {} diverged at epoch {}\n", r.model, r.seed, *r.diverged_at);
  }
  fmt::print(out, "wrote {}\n", config.out_dir.string());
  return kOk;
}

int cmd_boundary(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  prepare_output_dir(config.out_dir);
  const auto units = default_boundary_units(config.betas);
  const auto hard_and = decision_boundary_grid({UnitKind::hard_and}, config.resolution);
  const auto hard_or = decision_boundary_grid({UnitKind::hard_or}, config.resolution);

  std::string table = "unit,max_abs_dev,mean_abs_dev,agreement\n";
  fmt::print(out, "{:<24} {:>12} {:>12} {:>10}\n", "unit", "max|d-hard|", "mean|d-hard|", "agree@.25");
  for (const auto& unit : units) {
    const auto grid = decision_boundary_grid(unit, config.resolution);
    const auto label = unit.label();
    write_file(config.out_dir / ("grid_" + label + ".csv"), [&](std::ostream& f) { write_grid_csv(f, grid); });
    if (config.svg) {
      write_file(config.out_dir / ("grid_" + label + ".svg"), [&](std::ostream& f) { write_grid_svg(f, grid); });
    }
    if (unit.kind == UnitKind::lnu_and || unit.kind == UnitKind::lnu_or) {
      const auto& hard = unit.kind == UnitKind::lnu_and ? hard_and : hard_or;
      double max_dev = 0.0;
      for (std::size_t k = 0; k < grid.values.size(); ++k) {
        max_dev = std::max(max_dev, std::abs(grid.values[k] - hard.values[k]));
      }
      const double mean_dev = mean_abs_deviation(grid, hard);
      const double agree = threshold_agreement(grid, hard, 0.25, 0.02);
      table += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", label, max_dev, mean_dev, agree);
      fmt::print(out, "{:<24} {:>12.4f} {:>12.4f} {:>9.2f}%\n", label, max_dev, mean_dev, 100 * agree);
    } else {
      fmt::print(out, "{:<24}\n", label);
    }
  }
  write_text_file(config.out_dir / "boundary.csv", table);
  fmt::print(out, "wrote {} grids ({}x{}) to {}\n", units.size(), config.resolution, config.resolution,
             config.out_dir.string());
  return kOk;
}

int cmd_truth_table(double beta, std::ostream& out) {
  const auto ops = all_logic_ops();
  bool ok = true;
  fmt::print(out, "op,arity,max_deviation\n");
  for (std::size_t arity : {2u, 3u}) {
    for (const auto& row : truth_table_sweep(ops, arity, beta)) {
      fmt::print(out, "{},{},{:.6g}\n", row.op, row.arity, row.max_deviation);
      ok = ok && row.max_deviation <= (row.op.starts_with("soft") ? 0.01 : 0.0);
    }
  }
  return ok ? kOk : kVerificationFailed;
}

int cmd_gradcheck(std::span<const GradCheckCase> cases, std::size_t points, std::uint64_t seed,
                  std::ostream& out) {
  const auto checks = run_gradchecks(cases, points, seed);
  fmt::print(out, "max relative error over {} points per case\n", points);
  print_checks(out, checks);
  const bool ok = all_passed(checks);
  fmt::print(out, "{} cases, {}\n", checks.size(), ok ? "all passed" : "FAILURES");
  return ok ? kOk : kVerificationFailed;
}

int cmd_logic_checks(std::uint64_t seed, std::ostream& out) {
  const auto checks = run_logic_checks(seed);
  out << to_json(checks).dump(2) << '\n';
  return all_passed(checks) ? kOk : kVerificationFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logical neural units: toy experiments, decision boundaries and verification"};
  app.footer(kFooter);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> seeds, epochs, resolution;
  std::string beta_list;
  bool svg = false;
  std::size_t points = 100;
  std::uint64_t seed = 7;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
  };

  auto* train = app.add_subcommand("train", "train all models over every seed");
  add_config(train);
  train->add_option("--seeds", seeds, "number of seeds")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  train->add_option("--epochs", epochs, "epochs per run")->check(CLI::PositiveNumber);

  auto* boundary = app.add_subcommand("boundary", "export single-unit decision boundary grids");
  add_config(boundary);
  boundary->add_option("--beta", beta_list, "comma separated sharpness values");
  boundary->add_option("--resolution", resolution, "grid points per axis");
  boundary->add_flag("--svg", svg, "also write SVG heatmaps");

  auto* truth = app.add_subcommand("truth-table", "operator deviation from Boolean truth tables");
  truth->add_option("--beta", beta_list, "sharpness of the soft operators (default 100)");

  auto* grad = app.add_subcommand("gradcheck", "central finite-difference gradient checks");
  grad->add_option("--points", points, "random points per case");
  grad->add_option("--seed", seed, "seed for the random points");

  auto* logic = app.add_subcommand("logic-checks", "operator algebra checks, JSON report");
  logic->add_option("--seed", seed, "seed for the random vectors");
  logic->add_option("--out", out_dir, "also write logic_checks.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto load = [&] {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
      if (out_dir) cfg.out_dir = *out_dir;
      if (seeds) cfg.train.seeds = TrainConfig::default_seeds(*seeds, cfg.train.seeds.front());
      if (epochs) cfg.train.epochs = *epochs;
      if (resolution) cfg.resolution = *resolution;
      if (!beta_list.empty()) cfg.betas = parse_double_list(beta_list);
      if (svg) cfg.svg = true;
      return cfg;
    };
    if (*train) return cmd_train(load(), out);
    if (*boundary) return cmd_boundary(load(), out);
    if (*truth) {
      const auto betas = beta_list.empty() ? std::vector<double>{100.0} : parse_double_list(beta_list);
      if (betas.size() != 1) throw ConfigError("truth-table takes a single --beta value");
      return cmd_truth_table(betas.front(), out);
    }
    if (*grad) {
      if (points == 0) throw ConfigError("--points must be >= 1");
      const auto cases = standard_gradcheck_cases();
      return cmd_gradcheck(cases, points, seed, out);
    }
    if (*logic) {
      if (!out_dir) return cmd_logic_checks(seed, out);
      prepare_output_dir(*out_dir);
      std::ostringstream report;
      const int code = cmd_logic_checks(seed, report);
      write_text_file(std::filesystem::path(*out_dir) / "logic_checks.json", report.str());
      out << report.str();
      return code;
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    fmt::print(err, "output error: {}\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "invalid value: {}\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace lnu::cli
