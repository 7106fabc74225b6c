#include "lnu/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "lnu/lnu_layer.hpp"
#include "lnu/models.hpp"
#include "lnu/soft_logic.hpp"

namespace lnu {

std::string_view to_string(LogicOp op) {
  switch (op) {
    case LogicOp::godel_and: return "godel_and";
    case LogicOp::godel_or: return "godel_or";
    case LogicOp::nln_and: return "nln_and";
    case LogicOp::nln_or: return "nln_or";
    case LogicOp::lnn_and: return "lnn_and";
    case LogicOp::lnn_or: return "lnn_or";
    case LogicOp::soft_and: return "soft_and";
    case LogicOp::soft_or: return "soft_or";
  }
  return "?";
}

std::vector<LogicOp> all_logic_ops() {
  return {LogicOp::godel_and, LogicOp::godel_or, LogicOp::nln_and,  LogicOp::nln_or,
          LogicOp::lnn_and,   LogicOp::lnn_or,   LogicOp::soft_and, LogicOp::soft_or};
}

bool is_conjunction(LogicOp op) {
  return op == LogicOp::godel_and || op == LogicOp::nln_and || op == LogicOp::lnn_and ||
         op == LogicOp::soft_and;
}

double apply_logic_op(LogicOp op, std::span<const double> x, double beta) {
  const std::vector<double> ones(x.size(), 1.0);
  switch (op) {
    case LogicOp::godel_and: return logic::godel_and(x);
    case LogicOp::godel_or: return logic::godel_or(x);
    case LogicOp::nln_and: return logic::nln_and(x, ones);
    case LogicOp::nln_or: return logic::nln_or(x, ones);
    case LogicOp::lnn_and: return logic::lnn_and(x, ones, 1.0);
    case LogicOp::lnn_or: return logic::lnn_or(x, ones, 1.0);
    case LogicOp::soft_and: return logic::soft_and(x, logic::Sharpness(beta));
    case LogicOp::soft_or: return logic::soft_or(x, logic::Sharpness(beta));
  }
  return 0.0;
}

std::vector<TruthTableRow> truth_table_sweep(std::span<const LogicOp> ops, std::size_t arity,
                                             double beta) {
  if (arity < 2 || arity > 3) throw ConfigError(fmt::format("truth table arity must be 2 or 3, got {}", arity));
  std::vector<TruthTableRow> rows;
  for (LogicOp op : ops) {
    TruthTableRow row{std::string(to_string(op)), arity, 0.0};
    for (std::size_t corner = 0; corner < (1u << arity); ++corner) {
      std::vector<double> x(arity);
      bool all = true;
      bool any = false;
      for (std::size_t j = 0; j < arity; ++j) {
        const bool bit = (corner >> (arity - 1 - j)) & 1u;
        x[j] = bit ? 1.0 : 0.0;
        all = all && bit;
        any = any || bit;
      }
      const double expected = (is_conjunction(op) ? all : any) ? 1.0 : 0.0;
      row.max_deviation = std::max(row.max_deviation, std::abs(apply_logic_op(op, x, beta) - expected));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(std::span<const CheckResult> results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back({{"name", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"passed", r.passed}});
    all = all && r.passed;
  }
  return {{"passed", all}, {"checks", checks}};
}

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t d, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(d);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

CheckResult at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

void shuffle(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
}

}  // namespace

std::vector<CheckResult> run_logic_checks(std::uint64_t seed) {
  using logic::Sharpness;
  Rng rng(seed);
  std::vector<CheckResult> out;
  const std::size_t dims[] = {2, 3, 8};
  const double betas[] = {0.0, 1.0, 10.0, 100.0};
  constexpr std::size_t kSamples = 1000;

  double demorgan = 0.0;
  double hull = 0.0;
  for (std::size_t d : dims)
    for (double b : betas)
      for (std::size_t s = 0; s < kSamples; ++s) {
        const auto z = random_vector(rng, d);
        std::vector<double> nz(d);
        for (std::size_t i = 0; i < d; ++i) nz[i] = 1.0 - z[i];
        const double a = logic::soft_and(z, Sharpness(b));
        const double o = logic::soft_or(z, Sharpness(b));
        demorgan = std::max(demorgan, std::abs(logic::soft_or(nz, Sharpness(b)) - (1.0 - a)));
        const double lo = logic::godel_and(z);
        const double hi = logic::godel_or(z);
        for (double v : {a, o}) hull = std::max({hull, lo - v, v - hi});
      }
  out.push_back(at_most("demorgan_duality", demorgan, 1e-12));
  // Rounding in the weighted average may land one ulp outside [min, max].
  out.push_back(at_most("convex_hull", hull, 1e-15));

  double sharp = 0.0;
  for (std::size_t d : dims)
    for (std::size_t s = 0; s < kSamples; ++s) {
      auto z = random_vector(rng, d, 0.1, 0.9);
      const std::size_t k = rng.index(d);
      auto low = z;
      low[k] = rng.uniform(0.0, 0.9);
      for (std::size_t i = 0; i < d; ++i)
        if (i != k) low[i] = rng.uniform(low[k] + 0.1, 1.0);
      auto high = z;
      high[k] = rng.uniform(0.1, 1.0);
      for (std::size_t i = 0; i < d; ++i)
        if (i != k) high[i] = rng.uniform(0.0, high[k] - 0.1);
      sharp = std::max(sharp, std::abs(logic::soft_and(low, Sharpness(200)) - logic::godel_and(low)));
      sharp = std::max(sharp, std::abs(logic::soft_or(high, Sharpness(200)) - logic::godel_or(high)));
    }
  out.push_back(at_most("sharp_limit_beta200", sharp, 1e-6));

  double mean_dev = 0.0;
  for (std::size_t d : dims)
    for (std::size_t s = 0; s < kSamples; ++s) {
      const auto z = random_vector(rng, d);
      const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(d);
      mean_dev = std::max({mean_dev, std::abs(logic::soft_and(z, Sharpness(0)) - mean),
                           std::abs(logic::soft_or(z, Sharpness(0)) - mean)});
    }
  out.push_back(at_most("beta0_mean_reduction", mean_dev, 1e-12));

  double perm = 0.0;
  for (std::size_t d : dims)
    for (std::size_t s = 0; s < kSamples; ++s) {
      const auto x = random_vector(rng, d);
      const auto w = random_vector(rng, d);
      std::vector<std::size_t> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      shuffle(idx, rng);
      std::vector<double> px(d), pw(d);
      for (std::size_t i = 0; i < d; ++i) {
        px[i] = x[idx[i]];
        pw[i] = w[idx[i]];
      }
      const double b = 10.0;
      auto ops = [&](const std::vector<double>& xs, const std::vector<double>& ws) {
        const auto z = logic::weighted_gate(xs, ws);
        return std::vector<double>{logic::soft_and(z, Sharpness(b)), logic::soft_or(z, Sharpness(b)),
                                   logic::godel_and(z), logic::godel_or(z),
                                   logic::nln_and(xs, ws), logic::nln_or(xs, ws),
                                   logic::lnn_and(xs, ws, 1.0), logic::lnn_or(xs, ws, 1.0)};
      };
      const auto before = ops(x, w);
      const auto after = ops(px, pw);
      for (std::size_t i = 0; i < before.size(); ++i) perm = std::max(perm, std::abs(before[i] - after[i]));
    }
  out.push_back(at_most("permutation_invariance", perm, 1e-12));

  const auto ops = all_logic_ops();
  for (std::size_t arity : {2u, 3u}) {
    for (const auto& row : truth_table_sweep(ops, arity, 100.0)) {
      const bool soft = row.op.starts_with("soft");
      out.push_back(at_most(fmt::format("truth_table_{}_arity{}", row.op, arity), row.max_deviation,
                            soft ? 0.01 : 0.0));
    }
  }
  return out;
}

namespace {

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double lo, double hi) {
  Tensor t(r, c);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Uniform in [-2, 2] with |x| >= 1e-3, away from the ReLU kink.
Tensor kink_free(Rng& rng, std::size_t r, std::size_t c) {
  Tensor t(r, c);
  for (double& v : t.data()) {
    do v = rng.uniform(-2.0, 2.0);
    while (std::abs(v) < 1e-3);
  }
  return t;
}

// Random linear read-out so no op is checked through a constant-sum output.
NodeId project(Graph& g, NodeId out, const Tensor& weights) {
  return g.sum_all(g.mul(out, g.constant(weights)));
}

GradCheckCase unary_case(std::string name, std::size_t r, std::size_t c, double lo, double hi,
                         std::function<NodeId(Graph&, NodeId)> op) {
  return {std::move(name), [=](Rng& rng) {
            const Tensor x = random_tensor(rng, r, c, lo, hi);
            const Tensor proj = random_tensor(rng, r, c, -1.0, 1.0);
            Graph probe;
            const Tensor shape = probe.value(op(probe, probe.constant(x)));
            const Tensor read = random_tensor(rng, shape.rows(), shape.cols(), -1.0, 1.0);
            const std::vector<Tensor> params{x};
            return finite_difference_check(
                [&](Graph& g, std::span<const NodeId> p) { return project(g, op(g, p[0]), read); },
                params);
          }};
}

GradCheckCase binary_case(std::string name, std::size_t ra, std::size_t ca, std::size_t rb,
                          std::size_t cb, std::function<NodeId(Graph&, NodeId, NodeId)> op) {
  return {std::move(name), [=](Rng& rng) {
            const std::vector<Tensor> params{random_tensor(rng, ra, ca, -1.0, 1.0),
                                             random_tensor(rng, rb, cb, -1.0, 1.0)};
            Graph probe;
            const Tensor shape =
                probe.value(op(probe, probe.constant(params[0]), probe.constant(params[1])));
            const Tensor read = random_tensor(rng, shape.rows(), shape.cols(), -1.0, 1.0);
            return finite_difference_check(
                [&](Graph& g, std::span<const NodeId> p) { return project(g, op(g, p[0], p[1]), read); },
                params);
          }};
}

// True if any hidden pre-activation lies within 1e-3 of zero.
bool near_relu_kink(const Model& model, const Tensor& x) {
  Graph g;
  const auto params = model.parameters();
  NodeId pre = g.matmul(g.constant(x), g.constant(params[0].value));
  if (model.spec().hidden_bias) pre = g.add(pre, g.constant(params[1].value));
  const Tensor& v = g.value(pre);
  return std::any_of(v.data().begin(), v.data().end(), [](double z) { return std::abs(z) < 1e-3; });
}

GradCheckCase model_case(const ModelSpec& spec) {
  return {"model_" + spec.name, [spec](Rng& rng) {
            const Model model = Model::build(spec, static_cast<std::uint64_t>(rng.index(1u << 30)));
            Tensor x = random_tensor(rng, 6, spec.input_dim, 0.0, 1.0);
            if (spec.kind == ModelKind::perceptron && spec.activation == HiddenActivation::relu) {
              while (near_relu_kink(model, x)) x = random_tensor(rng, 6, spec.input_dim, 0.0, 1.0);
            }
            Tensor y(6, 1);
            for (double& v : y.data()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
            std::vector<Tensor> params;
            for (const auto& p : model.parameters()) params.push_back(p.value);
            return finite_difference_check(
                [&](Graph& g, std::span<const NodeId> p) {
                  return g.bce_loss(model.forward(g, g.constant(x), p), y);
                },
                params);
          }};
}

}  // namespace

std::vector<GradCheckCase> standard_gradcheck_cases() {
  std::vector<GradCheckCase> cases;
  cases.push_back(binary_case("add_row_broadcast", 3, 4, 1, 4,
                              [](Graph& g, NodeId a, NodeId b) { return g.add(a, b); }));
  cases.push_back(binary_case("sub_col_broadcast", 3, 4, 3, 1,
                              [](Graph& g, NodeId a, NodeId b) { return g.sub(a, b); }));
  cases.push_back(binary_case("mul", 3, 4, 3, 4, [](Graph& g, NodeId a, NodeId b) { return g.mul(a, b); }));
  cases.push_back(binary_case("mul_scalar_broadcast", 3, 4, 1, 1,
                              [](Graph& g, NodeId a, NodeId b) { return g.mul(a, b); }));
  cases.push_back(binary_case("matmul", 3, 4, 4, 2,
                              [](Graph& g, NodeId a, NodeId b) { return g.matmul(a, b); }));
  cases.push_back(binary_case("concat_cols", 3, 2, 3, 3,
                              [](Graph& g, NodeId a, NodeId b) { return g.concat_cols(a, b); }));
  cases.push_back(unary_case("neg", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.neg(x); }));
  cases.push_back(unary_case("scale", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.scale(x, -2.5); }));
  cases.push_back(unary_case("one_minus", 3, 4, 0, 1, [](Graph& g, NodeId x) { return g.one_minus(x); }));
  cases.push_back(unary_case("sigmoid", 3, 4, -3, 3, [](Graph& g, NodeId x) { return g.sigmoid(x); }));
  cases.push_back({"relu", [](Rng& rng) {
                     const std::vector<Tensor> params{kink_free(rng, 3, 4)};
                     const Tensor read = random_tensor(rng, 3, 4, -1.0, 1.0);
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) { return project(g, g.relu(p[0]), read); },
                         params);
                   }});
  cases.push_back(unary_case("gelu", 3, 4, -3, 3, [](Graph& g, NodeId x) { return g.gelu(x); }));
  cases.push_back(unary_case("exp", 3, 4, -2, 2, [](Graph& g, NodeId x) { return g.exp(x); }));
  cases.push_back(unary_case("softplus", 3, 4, -3, 3, [](Graph& g, NodeId x) { return g.softplus(x); }));
  cases.push_back(unary_case("softmax_rows", 3, 4, -1, 1,
                             [](Graph& g, NodeId x) { return g.softmax_rows(x, 3.0); }));
  cases.push_back(unary_case("sum_rows", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.sum(x, Axis::rows); }));
  cases.push_back(unary_case("sum_cols", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.sum(x, Axis::cols); }));
  cases.push_back(unary_case("mean_rows", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.mean(x, Axis::rows); }));
  cases.push_back(unary_case("mean_cols", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.mean(x, Axis::cols); }));
  cases.push_back(unary_case("slice_rows", 5, 3, -1, 1, [](Graph& g, NodeId x) { return g.slice_rows(x, 1, 3); }));
  cases.push_back(unary_case("transpose", 3, 4, -1, 1, [](Graph& g, NodeId x) { return g.transpose(x); }));
  cases.push_back({"bce_loss", [](Rng& rng) {
                     const std::vector<Tensor> params{random_tensor(rng, 5, 1, 0.05, 0.95)};
                     Tensor t(5, 1);
                     for (double& v : t.data()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) { return g.bce_loss(p[0], t); }, params);
                   }});
  cases.push_back(unary_case("soft_and_beta10", 1, 5, 0, 1,
                             [](Graph& g, NodeId z) { return soft_and_rows(g, z, 10.0); }));
  cases.push_back(unary_case("soft_or_beta10", 1, 5, 0, 1,
                             [](Graph& g, NodeId z) { return soft_or_rows(g, z, 10.0); }));
  cases.push_back({"soft_imply_beta10", [](Rng& rng) {
                     const std::vector<Tensor> params{random_tensor(rng, 3, 4, 0, 1),
                                                      random_tensor(rng, 3, 4, 0, 1)};
                     const Tensor read = random_tensor(rng, 3, 4, -1.0, 1.0);
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) {
                           return project(g, soft_imply(g, p[0], p[1], 10.0), read);
                         },
                         params);
                   }});
  cases.push_back({"lnu_layer_trainable_beta_negation", [](Rng& rng) {
                     const LnuConfig cfg{.input_dim = 4, .units = 3, .beta = 5.0, .trainable_beta = true,
                                         .normalize = false, .include_negation = true};
                     LnuParams lnu = LnuParams::init(cfg, rng);
                     lnu.w_not = random_tensor(rng, 4, 3, -1.0, 1.0);
                     const std::vector<Tensor> params{random_tensor(rng, 5, 4, 0.01, 0.99), lnu.w_and, lnu.w_or,
                                                      lnu.w_not, lnu.beta_raw};
                     const Tensor read = random_tensor(rng, 5, cfg.output_width(), -1.0, 1.0);
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) {
                           return project(g, lnu_forward(g, p[0], cfg, LnuNodes{p[1], p[2], p[3], p[4]}), read);
                         },
                         params);
                   }});
  cases.push_back({"lnu_layer_fixed_beta_normalized", [](Rng& rng) {
                     const LnuConfig cfg{.input_dim = 5, .units = 2, .beta = 10.0, .normalize = true};
                     const LnuParams lnu = LnuParams::init(cfg, rng);
                     const std::vector<Tensor> params{random_tensor(rng, 4, 5, 0.01, 0.99), lnu.w_and, lnu.w_or};
                     const Tensor read = random_tensor(rng, 4, cfg.output_width(), -1.0, 1.0);
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) {
                           return project(g, lnu_forward(g, p[0], cfg, LnuNodes{p[1], p[2], {}, {}}), read);
                         },
                         params);
                   }});
  cases.push_back({"lnu_stack_depth3_soft_imply", [](Rng& rng) {
                     const LnuConfig base{.input_dim = 4, .beta = 3.0, .trainable_beta = true};
                     const std::size_t units[] = {2, 2, 2};
                     const LnuStack stack = LnuStack::build(base, units, ResidualMode::soft_imply, rng);
                     std::vector<Tensor> params{random_tensor(rng, 4, 4, 0.01, 0.99)};
                     for (const auto& l : stack.layers()) {
                       params.insert(params.end(), {l.w_and, l.w_or, l.beta_raw});
                     }
                     const Tensor read = random_tensor(rng, 4, stack.output_width(), -1.0, 1.0);
                     return finite_difference_check(
                         [&](Graph& g, std::span<const NodeId> p) {
                           std::vector<LnuNodes> nodes;
                           for (std::size_t l = 0; l < 3; ++l) {
                             nodes.push_back({p[1 + 3 * l], p[2 + 3 * l], {}, p[3 + 3 * l]});
                           }
                           return project(g, lnu_stack_forward(g, p[0], stack, nodes), read);
                         },
                         params);
                   }});
  for (const auto& spec : default_model_specs()) cases.push_back(model_case(spec));
  return cases;
}

std::vector<CheckResult> run_gradchecks(std::span<const GradCheckCase> cases, std::size_t points,
                                        std::uint64_t seed, double tolerance) {
  std::vector<CheckResult> out;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    Rng rng(derive_seed(seed, c));
    double worst = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double err = cases[c].run(rng).max_rel_error;
      if (std::isnan(err)) {
        worst = err;
        break;
      }
      worst = std::max(worst, err);
    }
    out.push_back({cases[c].name, worst, tolerance, worst <= tolerance});
  }
  return out;
}

}  // namespace lnu
