#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lnu/formula.hpp"
#include "lnu/random.hpp"
#include "lnu/soft_logic.hpp"
#include "lnu/verification.hpp"

using namespace lnu;
using namespace lnu::logic;

namespace {

// Naive long-double reference: sum_i z_i e^{s z_i} / sum_i e^{s z_i}.
double reference_gate(const std::vector<double>& z, double s) {
  long double num = 0, den = 0;
  for (double v : z) {
    const long double e = std::exp(static_cast<long double>(s) * v);
    num += e * v;
    den += e;
  }
  return static_cast<double>(num / den);
}

std::vector<double> draw(Rng& rng, std::size_t d) {
  std::vector<double> z(d);
  for (double& v : z) v = rng.uniform();
  return z;
}

}  // namespace

TEST(Formula, ToyTruthTable) {
  const Formula f = toy_formula();
  EXPECT_TRUE(hard_eval(f, {true, false, false}));
  EXPECT_FALSE(hard_eval(f, {true, true, true}));
  EXPECT_FALSE(hard_eval(f, {false, false, false}));
  int true_rows = 0;
  for (int m = 0; m < 8; ++m) true_rows += hard_eval(f, {bool(m & 4), bool(m & 2), bool(m & 1)});
  EXPECT_EQ(true_rows, 3);
  EXPECT_THROW(hard_eval(f, {true, false}), ValidationError);
}

TEST(Formula, ParseRoundTrip) {
  const Formula f = parse_formula("(x1 | x2) & !x3");
  EXPECT_EQ(f, toy_formula());
  EXPECT_EQ(parse_formula(f.to_string()), f);
  EXPECT_EQ(f.arity(), 3u);
  const Formula g = parse_formula("x1 -> x2 -> x3");
  EXPECT_EQ(g, Formula::imply(Formula::var(0), Formula::imply(Formula::var(1), Formula::var(2))));
  EXPECT_EQ(parse_formula("x1 | x2 & x3"),
            Formula::disj(Formula::var(0), Formula::conj(Formula::var(1), Formula::var(2))));
  for (const char* bad : {"", "x0", "x1 &", "(x1", "y1", "x1 x2"}) {
    EXPECT_THROW(parse_formula(bad), ConfigError) << bad;
  }
}

TEST(Godel, Examples) {
  const std::vector<double> z{0.2, 0.8};
  EXPECT_EQ(godel_and(z), 0.2);
  EXPECT_EQ(godel_or(z), 0.8);
  const std::vector<double> c(5, 0.37);
  EXPECT_EQ(godel_and(c), 0.37);
  EXPECT_THROW(godel_and(std::vector<double>{}), ValidationError);
}

TEST(SoftOps, Examples) {
  for (double b : {0.0, 3.0, 100.0}) EXPECT_NEAR(soft_and(std::vector<double>{0.5, 0.5}, Sharpness(b)), 0.5, 1e-15);
  const std::vector<double> z{0.5, 0.1};
  EXPECT_NEAR(soft_and(z, Sharpness(100)), 0.1, 1e-9);
  EXPECT_NEAR(soft_or(z, Sharpness(0)), 0.3, 1e-15);
  EXPECT_THROW(soft_or(std::vector<double>{}, Sharpness(1)), ValidationError);
  EXPECT_THROW(Sharpness(-0.1), ValidationError);
  EXPECT_THROW(Sharpness(NAN), ValidationError);
}

TEST(SoftOps, MatchLongDoubleReference) {
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const auto z = draw(rng, 1 + rng.index(8));
    const double b = rng.uniform(0.0, 60.0);
    EXPECT_NEAR(soft_and(z, Sharpness(b)), reference_gate(z, -b), 1e-13);
    EXPECT_NEAR(soft_or(z, Sharpness(b)), reference_gate(z, b), 1e-13);
  }
}

TEST(SoftOps, LargeInputsStayFinite) {
  const std::vector<double> z{1e6, -1e6, 3.0};
  EXPECT_EQ(soft_and(z, Sharpness(1000)), -1e6);
  EXPECT_EQ(soft_or(z, Sharpness(1000)), 1e6);
}

TEST(SoftOps, MonotoneInBeta) {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto z = draw(rng, 4);
    double prev_and = soft_and(z, Sharpness(0));
    double prev_or = soft_or(z, Sharpness(0));
    for (double b : {0.5, 1.0, 5.0, 20.0, 100.0}) {
      const double a = soft_and(z, Sharpness(b));
      const double o = soft_or(z, Sharpness(b));
      EXPECT_LE(a, prev_and + 1e-15);
      EXPECT_GE(o, prev_or - 1e-15);
      prev_and = a;
      prev_or = o;
    }
  }
}

TEST(WeightedGate, Examples) {
  const std::vector<double> x{0.3, 0.9};
  EXPECT_EQ(weighted_gate(x, std::vector<double>{1, 1}), x);
  EXPECT_EQ(weighted_gate(std::vector<double>{1, 1}, std::vector<double>{0.5, 0.5}), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(weighted_gate(x, std::vector<double>{0, 1})[0], 0.0);
  EXPECT_THROW(weighted_gate(x, std::vector<double>{1}), ShapeError);
}

TEST(SoftNot, Examples) {
  EXPECT_EQ(soft_not(0.0), 1.0);
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    EXPECT_NEAR(soft_not(soft_not(x)), x, 1e-15);
    EXPECT_EQ(soft_not(x, NegationMode::learned, 0.0), 0.5);
  }
  EXPECT_NEAR(soft_not(0.8, NegationMode::learned, 2.0), 1.0 - 1.0 / (1.0 + std::exp(-1.6)), 1e-15);
}

TEST(SoftImply, Examples) {
  const Sharpness sharp(100);
  for (double b : {0.0, 0.4, 1.0}) {
    EXPECT_NEAR(soft_imply(std::vector<double>{0}, std::vector<double>{b}, sharp)[0], 1.0, 1e-6);
  }
  EXPECT_NEAR(soft_imply(std::vector<double>{1}, std::vector<double>{1}, sharp)[0], 1.0, 1e-6);
  for (double b : {0.0, 1.0, 50.0}) {
    EXPECT_NEAR(soft_imply(std::vector<double>{0.5}, std::vector<double>{0.5}, Sharpness(b))[0], 0.5, 1e-15);
  }
  EXPECT_THROW(soft_imply(std::vector<double>{0.5}, std::vector<double>{0.5, 0.1}, sharp), ShapeError);
  // agrees with soft_or over the pair (1 - a, b)
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.uniform(), b = rng.uniform(), s = rng.uniform(0, 30);
    EXPECT_NEAR(soft_imply(std::vector<double>{a}, std::vector<double>{b}, Sharpness(s))[0],
                soft_or(std::vector<double>{1 - a, b}, Sharpness(s)), 1e-14);
  }
}

TEST(Nln, Examples) {
  const std::vector<double> ones{1, 1};
  EXPECT_EQ(nln_and(std::vector<double>{1, 1}, ones), 1.0);
  EXPECT_EQ(nln_or(std::vector<double>{1, 0}, ones), 1.0);
  EXPECT_NEAR(nln_and(std::vector<double>{0.5, 0.4}, ones), 0.2, 1e-15);
  const std::vector<double> zeros{0, 0};
  EXPECT_EQ(nln_and(std::vector<double>{0.1, 0.7}, zeros), 1.0);
  EXPECT_EQ(nln_or(std::vector<double>{0.1, 0.7}, zeros), 0.0);
  EXPECT_THROW(nln_or(std::vector<double>{0.1}, ones), ShapeError);
}

TEST(Lnn, Examples) {
  const std::vector<double> ones{1, 1};
  EXPECT_EQ(lnn_and(std::vector<double>{1, 1}, ones, 1.0), 1.0);
  EXPECT_EQ(lnn_or(std::vector<double>{0, 0}, ones, 1.0), 0.0);
  EXPECT_EQ(lnn_and(std::vector<double>{1, 0}, ones, 1.0), 0.0);
  // clamp caps at 1, relu does not
  EXPECT_EQ(lnn_or(std::vector<double>{1, 1}, ones, 1.0), 1.0);
  EXPECT_EQ(lnn_or(std::vector<double>{1, 1}, ones, 1.0, LnnActivation::relu), 2.0);
  EXPECT_THROW(lnn_and(std::vector<double>{1, 1}, std::vector<double>{1, -0.1}, 1.0), ValidationError);
  EXPECT_THROW(lnn_or(std::vector<double>{1, 1}, ones, -1.0), ValidationError);
}

TEST(Properties, DeMorganConvexHullMean) {
  Rng rng(17);
  for (std::size_t d : {2u, 3u, 8u}) {
    for (double b : {0.0, 1.0, 10.0, 100.0}) {
      for (int k = 0; k < 200; ++k) {
        const auto z = draw(rng, d);
        std::vector<double> nz(d);
        std::transform(z.begin(), z.end(), nz.begin(), [](double v) { return 1 - v; });
        const double a = soft_and(z, Sharpness(b));
        const double o = soft_or(z, Sharpness(b));
        EXPECT_NEAR(soft_or(nz, Sharpness(b)), 1 - a, 1e-12);
        EXPECT_NEAR(soft_and(nz, Sharpness(b)), 1 - o, 1e-12);
        const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
        EXPECT_GE(a, *lo - 1e-15);
        EXPECT_LE(o, *hi + 1e-15);
        EXPECT_LE(a, o + 1e-15);
        if (b == 0.0) {
          EXPECT_NEAR(a, std::accumulate(z.begin(), z.end(), 0.0) / d, 1e-12);
        }
      }
    }
  }
}

TEST(Properties, PermutationInvariance) {
  Rng rng(23);
  for (int k = 0; k < 200; ++k) {
    auto x = draw(rng, 5);
    auto w = draw(rng, 5);
    const double before[] = {soft_and(weighted_gate(x, w), Sharpness(7)), nln_or(x, w), lnn_and(x, w, 1.0)};
    std::reverse(x.begin(), x.end());
    std::reverse(w.begin(), w.end());
    std::rotate(x.begin(), x.begin() + 2, x.end());
    std::rotate(w.begin(), w.begin() + 2, w.end());
    const double after[] = {soft_and(weighted_gate(x, w), Sharpness(7)), nln_or(x, w), lnn_and(x, w, 1.0)};
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(before[i], after[i], 1e-12);
  }
}

TEST(Verification, LogicChecksAllPass) {
  const auto checks = run_logic_checks();
  EXPECT_EQ(checks.size(), 5u + 16u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value;
  const auto json = to_json(checks);
  EXPECT_TRUE(json.at("passed").get<bool>());
}

TEST(Verification, TruthTableSweep) {
  const auto ops = all_logic_ops();
  for (std::size_t arity : {2u, 3u}) {
    for (const auto& row : truth_table_sweep(ops, arity)) {
      if (row.op.starts_with("soft")) {
        EXPECT_LE(row.max_deviation, 0.01) << row.op;
      } else {
        EXPECT_EQ(row.max_deviation, 0.0) << row.op;
      }
    }
  }
  // at beta = 1 the soft operators are far from Boolean
  const LogicOp soft[] = {LogicOp::soft_and};
  EXPECT_GT(truth_table_sweep(soft, 2, 1.0).front().max_deviation, 0.2);
  EXPECT_THROW(truth_table_sweep(ops, 4), ConfigError);
}
