#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lnu/boundary.hpp"
#include "lnu/config.hpp"
#include "lnu/dataset.hpp"
#include "lnu/report.hpp"
#include "lnu/training.hpp"

using namespace lnu;

TEST(Dataset, OracleExamples) {
  const auto f = logic::toy_formula();
  EXPECT_TRUE(oracle_label(std::vector<double>{0.9, 0.1, 0.2}, f));
  EXPECT_FALSE(oracle_label(std::vector<double>{0.6, 0.7, 0.9}, f));
  EXPECT_FALSE(oracle_label(std::vector<double>{0.5, 0.5, 0.1}, f));  // 0.5 binarizes to false
}

TEST(Dataset, LabelsFollowOracleAndBaseRate) {
  const auto f = logic::toy_formula();
  Rng rng(1);
  const ToyDataset data = sample_dataset(100000, f, rng);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r[] = {data.inputs(i, 0), data.inputs(i, 1), data.inputs(i, 2)};
    for (std::size_t j = 0; j < 3; ++j) ASSERT_TRUE(r[j] >= 0.0 && r[j] < 1.0);
    const bool expected = (r[0] > 0.5 || r[1] > 0.5) && !(r[2] > 0.5);
    ASSERT_EQ(data.labels[i], expected);
    positives += expected;
  }
  EXPECT_NEAR(positives / 1e5, 3.0 / 8.0, 0.01);
}

TEST(Dataset, SplitsAndSeeds) {
  const auto f = logic::toy_formula();
  const auto [tr, te] = generate_toy_data(20, 200, 4, f);
  EXPECT_EQ(tr.size(), 20u);
  EXPECT_EQ(te.size(), 200u);
  EXPECT_NE(tr.inputs(0, 0), te.inputs(0, 0));
  const auto [tr2, te2] = generate_toy_data(20, 200, 4, f);
  EXPECT_EQ(tr.inputs, tr2.inputs);
  EXPECT_EQ(te.inputs, te2.inputs);
  EXPECT_NE(generate_toy_data(20, 200, 5, f).first.inputs, tr.inputs);
  EXPECT_EQ(tr.targets().cols(), 1u);
}

TEST(Summary, SampleStatistics) {
  const std::vector<double> v{0.8, 0.9, 0.75, 0.85};
  const Summary s = summarize(v);
  const double mean = (0.8 + 0.9 + 0.75 + 0.85) / 4;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(s.mean, mean, 1e-15);
  EXPECT_NEAR(s.std, std::sqrt(ss / 3), 1e-15);
  EXPECT_EQ(s.min, 0.75);
  EXPECT_EQ(s.max, 0.9);
  EXPECT_EQ(summarize(std::vector<double>{0.6, 0.6, 0.6}).std, 0.0);
}

TEST(Training, ImprovesAndIsDeterministic) {
  TrainConfig cfg;
  cfg.seeds = {0, 1};
  const auto specs = default_model_specs();
  const auto a = run_multi_seed(specs, cfg);
  const auto b = run_multi_seed(specs, cfg);
  ASSERT_EQ(a.runs.size(), 10u);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    ASSERT_EQ(a.runs[i].epochs.size(), 30u);
    for (std::size_t e = 0; e < 30; ++e) {
      EXPECT_EQ(a.runs[i].epochs[e].test_loss, b.runs[i].epochs[e].test_loss);
      EXPECT_GE(a.runs[i].epochs[e].train_accuracy, 0.0);
      EXPECT_LE(a.runs[i].epochs[e].train_accuracy, 1.0);
    }
    EXPECT_LT(a.runs[i].epochs.back().train_loss, a.runs[i].epochs.front().train_loss) << a.runs[i].model;
    EXPECT_FALSE(a.runs[i].diverged_at);
  }
  ASSERT_EQ(a.models.size(), 5u);
  for (const auto& m : a.models) {
    EXPECT_EQ(m.runs, 2u);
    for (const auto& s : m.test_accuracy) {
      EXPECT_GE(s.mean, s.min);
      EXPECT_LE(s.mean, s.max);
    }
  }
  EXPECT_EQ(a.model("Logicron").param_count, 90u);
  EXPECT_THROW(a.model("nope"), std::out_of_range);
}

TEST(Training, DivergenceIsFlaggedNotDropped) {
  const auto spec = default_model_specs()[1];
  Model model = Model::build(spec, 0);
  model.parameters().back().value[0] = std::numeric_limits<double>::quiet_NaN();  // head.bias
  const auto [tr, te] = generate_toy_data(20, 50, 0, logic::toy_formula());
  TrainConfig cfg;
  cfg.epochs = 3;
  const RunResult r = train(model, tr, te, cfg);
  ASSERT_TRUE(r.diverged_at);
  EXPECT_EQ(*r.diverged_at, 1u);
  EXPECT_EQ(r.epochs.size(), 3u);
  const auto agg = aggregate(std::vector<RunResult>{r, r});
  EXPECT_EQ(agg.front().diverged_runs, 2u);
}

TEST(Training, ConfigValidation) {
  TrainConfig cfg;
  cfg.seeds = {1};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.seeds = {1, 2};
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.epochs = 1;
  auto specs = default_model_specs(2);
  EXPECT_THROW(run_multi_seed(specs, cfg), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<Parameter> params{{"w", Tensor::from_rows({{1.0, -2.0}})}};
  Adam opt(AdamConfig{.lr = 0.1}, params);
  const std::vector<Tensor> grads{Tensor::from_rows({{0.3, -5.0}})};
  opt.step(params, grads);
  // bias-corrected first step is lr * g / (|g| + eps)
  EXPECT_NEAR(params[0].value(0, 0), 1.0 - 0.1 * 0.3 / (0.3 + 1e-8), 1e-12);
  EXPECT_NEAR(params[0].value(0, 1), -2.0 + 0.1 * 5.0 / (5.0 + 1e-8), 1e-12);
}

TEST(Boundary, Examples) {
  EXPECT_EQ((UnitSpec{UnitKind::hard_and}.evaluate(0.7, 0.6)), 1.0);
  EXPECT_EQ((UnitSpec{UnitKind::inner_relu, 0, 0.5, -0.5}.evaluate(1, 1)), 0.5);
  // two-entry closed form: z = (0.5, 0.1), weight on 0.1 is 1 / (1 + e^{-40})
  const double w = 1.0 / (1.0 + std::exp(-40.0));
  EXPECT_NEAR((UnitSpec{UnitKind::lnu_and, 100, 0.5}.evaluate(1.0, 0.2)), 0.1 * w + 0.5 * (1 - w), 1e-15);
  const auto grid = decision_boundary_grid({UnitKind::hard_and}, 11);
  EXPECT_EQ(grid.values(0, 0), 0.0);
  EXPECT_EQ(grid.values(10, 0), 0.0);
  EXPECT_EQ(grid.values(0, 10), 0.0);
  EXPECT_EQ(grid.values(10, 10), 1.0);
  EXPECT_EQ(grid.coordinate(0), 0.0);
  EXPECT_EQ(grid.coordinate(10), 1.0);
  EXPECT_THROW(decision_boundary_grid({UnitKind::hard_or}, 1), ConfigError);
  EXPECT_THROW(parse_unit_kind("xor"), ConfigError);
}

TEST(Boundary, InventoryAndSharpening) {
  const std::vector<double> betas{1, 10, 100};
  const auto units = default_boundary_units(betas);
  EXPECT_EQ(units.size(), 10u);
  for (UnitKind op : {UnitKind::lnu_and, UnitKind::lnu_or}) {
    const auto hard = decision_boundary_grid({op == UnitKind::lnu_and ? UnitKind::hard_and : UnitKind::hard_or}, 101);
    double prev = std::numeric_limits<double>::infinity();
    double prev_max = 0;
    for (double b : betas) {
      const auto g = decision_boundary_grid({op, b, 0.5}, 101);
      for (double v : g.values.data()) ASSERT_TRUE(std::isfinite(v));
      const double dev = mean_abs_deviation(g, hard);
      EXPECT_LT(dev, prev);
      prev = dev;
      double mx = 0;
      for (std::size_t k = 0; k < g.values.size(); ++k) mx = std::max(mx, std::abs(g.values[k] - hard.values[k]));
      if (b == 1) prev_max = mx;
      if (b == 100) {
        // AND's max deviation sits just above (0.5, 0.5), where w = 0.5 caps the
        // unit near 0.25 at any beta; only OR's max shrinks strictly.
        if (op == UnitKind::lnu_or) {
          EXPECT_GT(prev_max, mx);
        } else {
          EXPECT_GE(prev_max, mx);
        }
        EXPECT_GE(threshold_agreement(g, hard, 0.25, 0.02), 0.98);
      }
    }
  }
}

TEST(Report, RunsCsvLayout) {
  TrainConfig cfg;
  cfg.seeds = {0, 1};
  cfg.epochs = 2;
  const auto specs = default_model_specs();
  const auto res = run_multi_seed(std::span(specs).first(2), cfg);
  std::ostringstream out;
  write_runs_csv(out, res.runs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "model,seed,epoch,split,accuracy,loss");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 2u * 2 * 2 * 2);
  const auto j = summary_json(res, cfg);
  EXPECT_EQ(j.at("models").size(), 2u);
  EXPECT_EQ(j.at("config").at("formula"), logic::toy_formula().to_string());
}

TEST(Report, GridCsvAndSvg) {
  const auto g = decision_boundary_grid({UnitKind::lnu_or, 10, 0.5}, 5);
  std::ostringstream csv;
  write_grid_csv(csv, g);
  std::istringstream in(csv.str());
  std::string line;
  std::size_t r = 0;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(cells, cell, ',')) {
      EXPECT_EQ(std::stod(cell), g.values(r, c));
      ++c;
    }
    EXPECT_EQ(c, 5u);
    ++r;
  }
  EXPECT_EQ(r, 5u);
  std::ostringstream svg;
  write_grid_svg(svg, g);
  const std::string s = svg.str();
  std::size_t rects = 0;
  for (std::size_t pos = 0; (pos = s.find("<rect", pos)) != std::string::npos; ++pos) ++rects;
  EXPECT_EQ(rects, 25u);
  EXPECT_NE(s.find("lnu_or_beta10"), std::string::npos);
}

TEST(Report, ParamTableDocumentsReconciliation) {
  const auto table = format_param_table(default_model_specs());
  EXPECT_NE(table.find("97"), std::string::npos);
  EXPECT_NE(table.find("110"), std::string::npos);
  EXPECT_NE(table.find("single hidden layer"), std::string::npos);
}

TEST(Config, DefaultsAndOverrides) {
  const auto def = parse_config("");
  EXPECT_EQ(def.train.epochs, 30u);
  EXPECT_EQ(def.train.seeds.size(), 20u);
  EXPECT_EQ(def.train.n_train, 20u);
  EXPECT_EQ(def.train.n_test, 200u);
  EXPECT_EQ(def.models.size(), 5u);
  EXPECT_EQ(def.resolution, 101u);
  EXPECT_EQ(def.betas, (std::vector<double>{1, 10, 100}));

  const auto cfg = parse_config(
      "# comment\n[task]\nformula = x1 & x2\n[train]\nseeds = 3\nseed_base = 100\nlr = 0.05\n"
      "[models]\ninclude = MLP-ReLU, Logicron\nlogicron_units = 4\n[boundary]\nbetas = 2, 3\nsvg = true\n"
      "[output]\ndir = /tmp/x\n");
  EXPECT_EQ(cfg.train.formula.arity(), 2u);
  EXPECT_EQ(cfg.train.seeds, (std::vector<std::uint64_t>{100, 101, 102}));
  EXPECT_EQ(cfg.train.adam.lr, 0.05);
  ASSERT_EQ(cfg.models.size(), 2u);
  EXPECT_EQ(cfg.models[1].hidden, 4u);
  EXPECT_EQ(cfg.models[1].input_dim, 2u);
  EXPECT_TRUE(cfg.svg);
  EXPECT_EQ(cfg.betas, (std::vector<double>{2, 3}));
  EXPECT_EQ(cfg.out_dir, "/tmp/x");
}

TEST(Config, Errors) {
  for (const char* bad : {"[train]\nepochz = 3\n", "[nope]\na = 1\n", "[train]\nepochs = three\n",
                          "[train]\nepochs = -1\n", "[boundary]\nresolution = 1\n", "[train]\nseeds = 1\n",
                          "[models]\ninclude = Transformer\n", "[boundary]\nsvg = maybe\n",
                          "[task]\nformula = x1 &&\n", "[train\n"}) {
    EXPECT_THROW(parse_config(bad), ConfigError) << bad;
  }
  EXPECT_THROW(load_config("/nonexistent/lnu.ini"), ConfigError);
}
