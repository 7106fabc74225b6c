#include "lnu/lnu_layer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

#include <fmt/format.h>

namespace lnu {

namespace {

void warn_out_of_range_once(const Tensor& x) {
  static std::atomic<bool> warned{false};
  for (double v : x.data()) {
    if (v < 0.0 || v > 1.0) {
      if (!warned.exchange(true)) {
        std::cerr << "warning: LNU input outside [0, 1] (" << v << "); outputs are not bounded\n";
      }
      return;
    }
  }
}

Tensor uniform(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// sum_j softmax(+-beta z)_j z_j per row; `beta` is a 1x1 node when trainable.
NodeId gated_rows(Graph& g, NodeId z, bool conjunctive, double fixed_beta,
                  std::optional<NodeId> beta) {
  const NodeId logits = conjunctive ? g.neg(z) : z;
  const NodeId gate = beta ? g.softmax_rows(g.mul(logits, *beta), 1.0)
                           : g.softmax_rows(logits, fixed_beta);
  return g.sum(g.mul(gate, z), Axis::cols);
}

// One gated branch: n x d inputs against d x o weights -> n x o.
NodeId gated_branch(Graph& g, NodeId x, NodeId w, bool conjunctive, const LnuConfig& cfg,
                    std::optional<NodeId> beta) {
  const NodeId wt = g.transpose(w);
  std::optional<NodeId> out;
  for (std::size_t k = 0; k < cfg.units; ++k) {
    const NodeId z = g.mul(x, g.slice_rows(wt, k, 1));
    const NodeId unit = gated_rows(g, z, conjunctive, cfg.beta, beta);
    out = out ? g.concat_cols(*out, unit) : unit;
  }
  return *out;
}

}  // namespace

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw ValidationError(fmt::format("softplus_inverse: {} is not positive", y));
  // log(exp(y) - 1) without overflow for large y
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

NodeId soft_and_rows(Graph& graph, NodeId z, double beta, std::optional<NodeId> beta_raw) {
  return gated_rows(graph, z, true, beta,
                    beta_raw ? std::optional<NodeId>(graph.softplus(*beta_raw)) : std::nullopt);
}

NodeId soft_or_rows(Graph& graph, NodeId z, double beta, std::optional<NodeId> beta_raw) {
  return gated_rows(graph, z, false, beta,
                    beta_raw ? std::optional<NodeId>(graph.softplus(*beta_raw)) : std::nullopt);
}

LnuParams LnuParams::init(const LnuConfig& config, Rng& rng) {
  LnuParams p;
  p.config = config;
  p.w_and = uniform(config.input_dim, config.units, 0.25, 0.75, rng);
  p.w_or = uniform(config.input_dim, config.units, 0.25, 0.75, rng);
  if (config.include_negation) p.w_not = Tensor(config.input_dim, config.units);
  if (config.trainable_beta) p.beta_raw = Tensor::scalar(softplus_inverse(config.beta));
  p.validate();
  return p;
}

LnuParams LnuParams::fixed(const LnuConfig& config, Tensor w_and, Tensor w_or, Tensor w_not) {
  LnuParams p;
  p.config = config;
  p.w_and = std::move(w_and);
  p.w_or = std::move(w_or);
  p.w_not = std::move(w_not);
  if (config.trainable_beta) p.beta_raw = Tensor::scalar(softplus_inverse(config.beta));
  p.validate();
  return p;
}

void LnuParams::validate() const {
  const auto& c = config;
  if (c.input_dim == 0 || c.units == 0) throw ConfigError("LNU layer needs input_dim, units >= 1");
  if (!(c.beta >= 0.0)) throw ConfigError(fmt::format("LNU beta must be >= 0, got {}", c.beta));
  auto check = [&](const Tensor& t, const char* name) {
    if (t.rows() != c.input_dim || t.cols() != c.units) {
      throw ShapeError(fmt::format("LNU {} is {}, expected {}x{}", name, t.shape_string(),
                                   c.input_dim, c.units));
    }
  };
  check(w_and, "w_and");
  check(w_or, "w_or");
  if (c.include_negation) check(w_not, "w_not");
  if (c.trainable_beta && (beta_raw.rows() != 1 || beta_raw.cols() != 1)) {
    throw ShapeError("LNU beta_raw must be 1x1");
  }
}

double LnuParams::beta() const {
  if (!config.trainable_beta) return config.beta;
  const double r = beta_raw.item();
  return std::max(r, 0.0) + std::log1p(std::exp(-std::abs(r)));
}

LnuNodes bind_parameters(Graph& graph, const LnuParams& params) {
  LnuNodes n{graph.parameter(params.w_and), graph.parameter(params.w_or), {}, {}};
  if (params.config.include_negation) n.w_not = graph.parameter(params.w_not);
  if (params.config.trainable_beta) n.beta_raw = graph.parameter(params.beta_raw);
  return n;
}

LnuNodes bind_constants(Graph& graph, const LnuParams& params) {
  LnuNodes n{graph.constant(params.w_and), graph.constant(params.w_or), {}, {}};
  if (params.config.include_negation) n.w_not = graph.constant(params.w_not);
  if (params.config.trainable_beta) n.beta_raw = graph.constant(params.beta_raw);
  return n;
}

NodeId lnu_forward(Graph& g, NodeId x, const LnuConfig& cfg, const LnuNodes& nodes) {
  const Tensor& xv = g.value(x);
  if (xv.cols() != cfg.input_dim) {
    throw ShapeError(fmt::format("LNU expects {} input columns, got {}", cfg.input_dim,
                                 xv.shape_string()));
  }
  warn_out_of_range_once(xv);

  std::optional<NodeId> beta;
  if (cfg.trainable_beta) {
    if (!nodes.beta_raw) throw ConfigError("trainable beta needs a beta_raw node");
    beta = g.softplus(*nodes.beta_raw);
  }
  NodeId out = g.concat_cols(gated_branch(g, x, nodes.w_and, true, cfg, beta),
                             gated_branch(g, x, nodes.w_or, false, cfg, beta));
  if (cfg.normalize) out = g.scale(out, 1.0 / std::sqrt(static_cast<double>(cfg.input_dim)));
  if (cfg.include_negation) {
    if (!nodes.w_not) throw ConfigError("negation branch needs a w_not node");
    out = g.concat_cols(out, g.one_minus(g.sigmoid(g.matmul(x, *nodes.w_not))));
  }
  return out;
}

NodeId lnu_forward(Graph& graph, NodeId x, const LnuParams& params) {
  return lnu_forward(graph, x, params.config, bind_constants(graph, params));
}

NodeId soft_imply(Graph& g, NodeId a, NodeId b, double beta, std::optional<NodeId> beta_raw) {
  // Two-entry softmax over (1 - a, b): weight on 1 - a is sigmoid(beta * (1 - a - b)).
  const NodeId diff = g.sub(g.one_minus(a), b);
  const NodeId logits = beta_raw ? g.mul(diff, g.softplus(*beta_raw)) : g.scale(diff, beta);
  return g.add(b, g.mul(g.sigmoid(logits), diff));
}

LnuStack::LnuStack(std::vector<LnuParams> layers, ResidualMode residual)
    : layers_(std::move(layers)), residual_(residual) {
  if (layers_.empty()) throw ConfigError("LNU stack needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].validate();
    const auto& cfg = layers_[l].config;
    if (l > 0 && cfg.input_dim != layers_[l - 1].config.output_width()) {
      throw ConfigError(fmt::format("LNU layer {} expects width {}, previous layer produces {}", l,
                                    cfg.input_dim, layers_[l - 1].config.output_width()));
    }
    if (residual_ == ResidualMode::soft_imply && cfg.output_width() != cfg.input_dim) {
      throw ConfigError(fmt::format(
          "soft-imply residual at layer {} needs output width == input width ({} vs {})", l,
          cfg.output_width(), cfg.input_dim));
    }
  }
}

LnuStack LnuStack::build(const LnuConfig& base, std::span<const std::size_t> units,
                         ResidualMode residual, Rng& rng, std::optional<bool> normalize) {
  const bool norm = normalize.value_or(units.size() > 1);
  std::vector<LnuParams> layers;
  std::size_t width = base.input_dim;
  for (std::size_t o : units) {
    LnuConfig cfg = base;
    cfg.input_dim = width;
    cfg.units = o;
    cfg.normalize = norm;
    layers.push_back(LnuParams::init(cfg, rng));
    width = cfg.output_width();
  }
  return LnuStack(std::move(layers), residual);
}

NodeId lnu_stack_forward(Graph& g, NodeId x, const LnuStack& stack, std::span<const LnuNodes> nodes) {
  if (nodes.size() != stack.layers().size()) {
    throw ConfigError("LNU stack: one node set per layer required");
  }
  NodeId h = x;
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    const LnuConfig& cfg = stack.layers()[l].config;
    const NodeId f = lnu_forward(g, h, cfg, nodes[l]);
    h = stack.residual() == ResidualMode::soft_imply
            ? soft_imply(g, h, f, cfg.beta, cfg.trainable_beta ? nodes[l].beta_raw : std::nullopt)
            : f;
  }
  return h;
}

NodeId lnu_stack_forward(Graph& graph, NodeId x, const LnuStack& stack) {
  std::vector<LnuNodes> nodes;
  for (const auto& layer : stack.layers()) nodes.push_back(bind_constants(graph, layer));
  return lnu_stack_forward(graph, x, stack, nodes);
}

}  // namespace lnu
