#include "lnu/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace lnu {

namespace {

std::size_t broadcast_extent(std::size_t a, std::size_t b, const Tensor& ta, const Tensor& tb,
                             std::string_view what) {
  if (a == b) return a;
  if (a == 1) return b;
  if (b == 1) return a;
  throw ShapeError(fmt::format("{}: cannot broadcast {} with {}", what, ta.shape_string(),
                               tb.shape_string()));
}

// Sums `g` down to `rows x cols` along every dimension that was broadcast.
Tensor reduce_to(const Tensor& g, std::size_t rows, std::size_t cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const std::size_t rr = rows == 1 ? 0 : r;
    for (std::size_t c = 0; c < g.cols(); ++c) {
      out(rr, cols == 1 ? 0 : c) += g(r, c);
    }
  }
  return out;
}

double sigmoid_value(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2 / pi)

double gelu_value(double x) {
  const double u = kSqrt2OverPi * (x + kGeluCoeff * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_derivative(double x) {
  const double u = kSqrt2OverPi * (x + kGeluCoeff * x * x * x);
  const double t = std::tanh(u);
  const double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluCoeff * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

double softplus_value(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Tensor map(const Tensor& t, auto&& fn) {
  Tensor out(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = fn(t[i]);
  return out;
}

OpKind activation_op(Activation kind) {
  switch (kind) {
    case Activation::sigmoid: return OpKind::sigmoid;
    case Activation::relu: return OpKind::relu;
    case Activation::gelu: return OpKind::gelu;
    case Activation::exp: return OpKind::exp;
    case Activation::softplus: return OpKind::softplus;
  }
  throw std::logic_error("unknown activation");
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::parameter: return "parameter";
    case OpKind::constant: return "constant";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::neg: return "neg";
    case OpKind::scale: return "scale";
    case OpKind::one_minus: return "one_minus";
    case OpKind::matmul: return "matmul";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::relu: return "relu";
    case OpKind::gelu: return "gelu";
    case OpKind::exp: return "exp";
    case OpKind::softplus: return "softplus";
    case OpKind::softmax_rows: return "softmax_rows";
    case OpKind::sum: return "sum";
    case OpKind::mean: return "mean";
    case OpKind::concat_cols: return "concat_cols";
    case OpKind::slice_rows: return "slice_rows";
    case OpKind::transpose: return "transpose";
    case OpKind::bce_loss: return "bce_loss";
    case OpKind::custom: return "custom";
  }
  return "?";
}

NodeId Graph::push(Node node) {
  if (backward_done_) throw std::logic_error("graph is closed after backward()");
  nodes_.push_back(std::move(node));
  return NodeId{nodes_.size() - 1};
}

Graph::Node& Graph::at(NodeId id) {
  if (id.index >= nodes_.size()) throw std::out_of_range("unknown node id");
  return nodes_[id.index];
}

const Graph::Node& Graph::at(NodeId id) const {
  if (id.index >= nodes_.size()) throw std::out_of_range("unknown node id");
  return nodes_[id.index];
}

NodeId Graph::parameter(Tensor value) {
  return push(Node{.op = OpKind::parameter, .value = std::move(value), .requires_grad = true});
}

NodeId Graph::constant(Tensor value) {
  return push(Node{.op = OpKind::constant, .value = std::move(value)});
}

NodeId Graph::binary(OpKind op, NodeId a, NodeId b) {
  const Tensor& ta = at(a).value;
  const Tensor& tb = at(b).value;
  const auto name = op_name(op);
  const std::size_t rows = broadcast_extent(ta.rows(), tb.rows(), ta, tb, name);
  const std::size_t cols = broadcast_extent(ta.cols(), tb.cols(), ta, tb, name);
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t ra = ta.rows() == 1 ? 0 : r;
    const std::size_t rb = tb.rows() == 1 ? 0 : r;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = ta(ra, ta.cols() == 1 ? 0 : c);
      const double y = tb(rb, tb.cols() == 1 ? 0 : c);
      switch (op) {
        case OpKind::add: out(r, c) = x + y; break;
        case OpKind::sub: out(r, c) = x - y; break;
        case OpKind::mul: out(r, c) = x * y; break;
        default: throw std::logic_error("not a binary op");
      }
    }
  }
  const bool rg = at(a).requires_grad || at(b).requires_grad;
  return push(Node{.op = op, .inputs = {a, b}, .value = std::move(out), .requires_grad = rg});
}

NodeId Graph::add(NodeId a, NodeId b) { return binary(OpKind::add, a, b); }
NodeId Graph::sub(NodeId a, NodeId b) { return binary(OpKind::sub, a, b); }
NodeId Graph::mul(NodeId a, NodeId b) { return binary(OpKind::mul, a, b); }

NodeId Graph::neg(NodeId a) {
  const Node& n = at(a);
  return push(Node{.op = OpKind::neg,
                   .inputs = {a},
                   .value = map(n.value, [](double v) { return -v; }),
                   .requires_grad = n.requires_grad});
}

NodeId Graph::scale(NodeId a, double factor) {
  const Node& n = at(a);
  return push(Node{.op = OpKind::scale,
                   .inputs = {a},
                   .value = map(n.value, [factor](double v) { return factor * v; }),
                   .requires_grad = n.requires_grad,
                   .param = factor});
}

NodeId Graph::one_minus(NodeId a) {
  const Node& n = at(a);
  return push(Node{.op = OpKind::one_minus,
                   .inputs = {a},
                   .value = map(n.value, [](double v) { return 1.0 - v; }),
                   .requires_grad = n.requires_grad});
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& ta = at(a).value;
  const Tensor& tb = at(b).value;
  if (ta.cols() != tb.rows()) {
    throw ShapeError(
        fmt::format("matmul: inner dimensions differ ({} * {})", ta.shape_string(), tb.shape_string()));
  }
  Tensor out(ta.rows(), tb.cols());
  for (std::size_t i = 0; i < ta.rows(); ++i)
    for (std::size_t k = 0; k < ta.cols(); ++k) {
      const double aik = ta(i, k);
      for (std::size_t j = 0; j < tb.cols(); ++j) out(i, j) += aik * tb(k, j);
    }
  const bool rg = at(a).requires_grad || at(b).requires_grad;
  return push(Node{.op = OpKind::matmul, .inputs = {a, b}, .value = std::move(out), .requires_grad = rg});
}

NodeId Graph::activation(Activation kind, NodeId x) {
  const Node& n = at(x);
  Tensor out;
  switch (kind) {
    case Activation::sigmoid: out = map(n.value, sigmoid_value); break;
    case Activation::relu: out = map(n.value, [](double v) { return v > 0 ? v : 0.0; }); break;
    case Activation::gelu: out = map(n.value, gelu_value); break;
    case Activation::exp: out = map(n.value, [](double v) { return std::exp(v); }); break;
    case Activation::softplus: out = map(n.value, softplus_value); break;
  }
  return push(Node{.op = activation_op(kind),
                   .inputs = {x},
                   .value = std::move(out),
                   .requires_grad = n.requires_grad});
}

NodeId Graph::softmax_rows(NodeId x, double temperature) {
  if (!(temperature >= 0.0)) {
    throw ValidationError(fmt::format("softmax temperature must be >= 0, got {}", temperature));
  }
  const Node& n = at(x);
  const Tensor& v = n.value;
  Tensor out(v.rows(), v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r) {
    if (v.cols() == 0) continue;
    double hi = temperature * v(r, 0);
    for (std::size_t c = 1; c < v.cols(); ++c) hi = std::max(hi, temperature * v(r, c));
    double total = 0.0;
    for (std::size_t c = 0; c < v.cols(); ++c) {
      out(r, c) = std::exp(temperature * v(r, c) - hi);
      total += out(r, c);
    }
    for (std::size_t c = 0; c < v.cols(); ++c) out(r, c) /= total;
  }
  return push(Node{.op = OpKind::softmax_rows,
                   .inputs = {x},
                   .value = std::move(out),
                   .requires_grad = n.requires_grad,
                   .param = temperature});
}

NodeId Graph::reduce(Reduction kind, NodeId x, Axis axis) {
  const Node& n = at(x);
  const Tensor& v = n.value;
  Tensor out = axis == Axis::rows ? Tensor(1, v.cols()) : Tensor(v.rows(), 1);
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) {
      if (axis == Axis::rows) out(0, c) += v(r, c);
      else out(r, 0) += v(r, c);
    }
  const std::size_t count = axis == Axis::rows ? v.rows() : v.cols();
  if (kind == Reduction::mean && count > 0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= static_cast<double>(count);
  }
  return push(Node{.op = kind == Reduction::sum ? OpKind::sum : OpKind::mean,
                   .inputs = {x},
                   .value = std::move(out),
                   .requires_grad = n.requires_grad,
                   .offset = static_cast<std::size_t>(axis)});
}

NodeId Graph::sum_all(NodeId x) { return sum(sum(x, Axis::cols), Axis::rows); }

NodeId Graph::concat_cols(NodeId a, NodeId b) {
  const Tensor& ta = at(a).value;
  const Tensor& tb = at(b).value;
  if (ta.rows() != tb.rows()) {
    throw ShapeError(fmt::format("concat_cols: row counts differ ({} vs {})", ta.shape_string(),
                                 tb.shape_string()));
  }
  Tensor out(ta.rows(), ta.cols() + tb.cols());
  for (std::size_t r = 0; r < ta.rows(); ++r) {
    for (std::size_t c = 0; c < ta.cols(); ++c) out(r, c) = ta(r, c);
    for (std::size_t c = 0; c < tb.cols(); ++c) out(r, ta.cols() + c) = tb(r, c);
  }
  const bool rg = at(a).requires_grad || at(b).requires_grad;
  return push(Node{.op = OpKind::concat_cols,
                   .inputs = {a, b},
                   .value = std::move(out),
                   .requires_grad = rg,
                   .offset = ta.cols()});
}

NodeId Graph::slice_rows(NodeId a, std::size_t begin, std::size_t count) {
  const Node& n = at(a);
  if (begin + count > n.value.rows()) {
    throw ShapeError(fmt::format("slice_rows: [{}, {}) out of range for {}", begin, begin + count,
                                 n.value.shape_string()));
  }
  Tensor out(count, n.value.cols());
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t c = 0; c < n.value.cols(); ++c) out(r, c) = n.value(begin + r, c);
  return push(Node{.op = OpKind::slice_rows,
                   .inputs = {a},
                   .value = std::move(out),
                   .requires_grad = n.requires_grad,
                   .offset = begin});
}

NodeId Graph::transpose(NodeId a) {
  const Node& n = at(a);
  return push(Node{.op = OpKind::transpose,
                   .inputs = {a},
                   .value = n.value.transposed(),
                   .requires_grad = n.requires_grad});
}

NodeId Graph::bce_loss(NodeId pred, const Tensor& target) {
  const Node& n = at(pred);
  if (!n.value.same_shape(target)) {
    throw ShapeError(fmt::format("bce_loss: prediction {} vs target {}", n.value.shape_string(),
                                 target.shape_string()));
  }
  if (target.empty()) throw ShapeError("bce_loss: empty prediction");
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double t = target[i];
    if (t != 0.0 && t != 1.0) {
      throw ValidationError(fmt::format("bce_loss: target entry {} is {}, expected 0 or 1", i, t));
    }
    const double p = std::clamp(n.value[i], kBceEpsilon, 1.0 - kBceEpsilon);
    total -= t == 1.0 ? std::log(p) : std::log(1.0 - p);
  }
  return push(Node{.op = OpKind::bce_loss,
                   .inputs = {pred},
                   .value = Tensor::scalar(total / static_cast<double>(target.size())),
                   .requires_grad = n.requires_grad,
                   .aux = target});
}

NodeId Graph::custom(std::vector<NodeId> inputs, Tensor value, BackwardFn backward) {
  bool rg = false;
  for (NodeId id : inputs) rg = rg || at(id).requires_grad;
  return push(Node{.op = OpKind::custom,
                   .inputs = std::move(inputs),
                   .value = std::move(value),
                   .requires_grad = rg,
                   .custom_backward = std::move(backward)});
}

const Tensor& Graph::value(NodeId id) const { return at(id).value; }

Tensor Graph::grad(NodeId id) const {
  const Node& n = at(id);
  if (n.grad.empty() && !n.value.empty()) return Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

OpKind Graph::kind(NodeId id) const { return at(id).op; }
bool Graph::requires_grad(NodeId id) const { return at(id).requires_grad; }

void Graph::accumulate(NodeId id, const Tensor& g) {
  Node& n = at(id);
  if (!n.requires_grad) return;
  if (!g.same_shape(n.value)) {
    throw ShapeError(fmt::format("gradient {} does not match node value {}", g.shape_string(),
                                 n.value.shape_string()));
  }
  if (n.grad.empty()) {
    n.grad = g;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
}

void Graph::backward(NodeId loss) {
  if (backward_done_) throw std::logic_error("backward() already ran on this graph");
  const Node& root = at(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw ShapeError("backward() needs a scalar (1x1) loss, got " + root.value.shape_string());
  }
  backward_done_ = true;
  if (!root.requires_grad) return;
  at(loss).grad = Tensor::scalar(1.0);
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.empty()) continue;
    backprop_node(node, node.grad);
  }
}

void Graph::backprop_node(const Node& node, const Tensor& g) {
  auto input = [&](std::size_t k) -> const Tensor& { return at(node.inputs[k]).value; };
  auto elementwise = [&](auto&& dfdx) {
    const Tensor& x = input(0);
    Tensor out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = g[i] * dfdx(i);
    accumulate(node.inputs[0], out);
  };

  switch (node.op) {
    case OpKind::parameter:
    case OpKind::constant:
      break;
    case OpKind::add:
    case OpKind::sub: {
      accumulate(node.inputs[0], reduce_to(g, input(0).rows(), input(0).cols()));
      Tensor gb = reduce_to(g, input(1).rows(), input(1).cols());
      if (node.op == OpKind::sub) gb = map(gb, [](double v) { return -v; });
      accumulate(node.inputs[1], gb);
      break;
    }
    case OpKind::mul: {
      const Tensor& a = input(0);
      const Tensor& b = input(1);
      Tensor ga(g.rows(), g.cols());
      Tensor gb(g.rows(), g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) {
          const double av = a(a.rows() == 1 ? 0 : r, a.cols() == 1 ? 0 : c);
          const double bv = b(b.rows() == 1 ? 0 : r, b.cols() == 1 ? 0 : c);
          ga(r, c) = g(r, c) * bv;
          gb(r, c) = g(r, c) * av;
        }
      accumulate(node.inputs[0], reduce_to(ga, a.rows(), a.cols()));
      accumulate(node.inputs[1], reduce_to(gb, b.rows(), b.cols()));
      break;
    }
    case OpKind::neg:
      elementwise([](std::size_t) { return -1.0; });
      break;
    case OpKind::scale:
      elementwise([&](std::size_t) { return node.param; });
      break;
    case OpKind::one_minus:
      elementwise([](std::size_t) { return -1.0; });
      break;
    case OpKind::matmul: {
      const Tensor& a = input(0);
      const Tensor& b = input(1);
      Tensor ga(a.rows(), a.cols());
      Tensor gb(b.rows(), b.cols());
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
          for (std::size_t j = 0; j < b.cols(); ++j) {
            ga(i, k) += g(i, j) * b(k, j);
            gb(k, j) += a(i, k) * g(i, j);
          }
      accumulate(node.inputs[0], ga);
      accumulate(node.inputs[1], gb);
      break;
    }
    case OpKind::sigmoid:
      elementwise([&](std::size_t i) { return node.value[i] * (1.0 - node.value[i]); });
      break;
    case OpKind::relu:
      elementwise([&](std::size_t i) { return input(0)[i] > 0 ? 1.0 : 0.0; });
      break;
    case OpKind::gelu:
      elementwise([&](std::size_t i) { return gelu_derivative(input(0)[i]); });
      break;
    case OpKind::exp:
      elementwise([&](std::size_t i) { return node.value[i]; });
      break;
    case OpKind::softplus:
      elementwise([&](std::size_t i) { return sigmoid_value(input(0)[i]); });
      break;
    case OpKind::softmax_rows: {
      const Tensor& y = node.value;
      Tensor gx(y.rows(), y.cols());
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c)
          gx(r, c) = node.param * y(r, c) * (g(r, c) - dot);
      }
      accumulate(node.inputs[0], gx);
      break;
    }
    case OpKind::sum:
    case OpKind::mean: {
      const Tensor& x = input(0);
      const bool over_rows = static_cast<Axis>(node.offset) == Axis::rows;
      const std::size_t count = over_rows ? x.rows() : x.cols();
      const double factor = node.op == OpKind::mean ? 1.0 / static_cast<double>(count) : 1.0;
      Tensor gx(x.rows(), x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) gx(r, c) = factor * (over_rows ? g(0, c) : g(r, 0));
      accumulate(node.inputs[0], gx);
      break;
    }
    case OpKind::concat_cols: {
      const Tensor& a = input(0);
      const Tensor& b = input(1);
      Tensor ga(a.rows(), a.cols());
      Tensor gb(b.rows(), b.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) ga(r, c) = g(r, c);
        for (std::size_t c = 0; c < b.cols(); ++c) gb(r, c) = g(r, node.offset + c);
      }
      accumulate(node.inputs[0], ga);
      accumulate(node.inputs[1], gb);
      break;
    }
    case OpKind::slice_rows: {
      const Tensor& x = input(0);
      Tensor gx(x.rows(), x.cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gx(node.offset + r, c) = g(r, c);
      accumulate(node.inputs[0], gx);
      break;
    }
    case OpKind::transpose:
      accumulate(node.inputs[0], g.transposed());
      break;
    case OpKind::bce_loss: {
      const Tensor& p = input(0);
      const Tensor& t = node.aux;
      const double n = static_cast<double>(t.size());
      Tensor gp(p.rows(), p.cols());
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= kBceEpsilon || p[i] >= 1.0 - kBceEpsilon) continue;
        const double d = t[i] == 1.0 ? -1.0 / p[i] : 1.0 / (1.0 - p[i]);
        gp[i] = g.item() * d / n;
      }
      accumulate(node.inputs[0], gp);
      break;
    }
    case OpKind::custom:
      node.custom_backward(*this, g);
      break;
  }
}

}  // namespace lnu
