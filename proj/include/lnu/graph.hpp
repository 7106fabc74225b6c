#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "lnu/tensor.hpp"

namespace lnu {

struct NodeId {
  std::size_t index = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class OpKind {
  parameter,
  constant,
  add,
  sub,
  mul,
  neg,
  scale,
  one_minus,
  matmul,
  sigmoid,
  relu,
  gelu,
  exp,
  softplus,
  softmax_rows,
  sum,
  mean,
  concat_cols,
  slice_rows,
  transpose,
  bce_loss,
  custom,
};

std::string_view op_name(OpKind kind);

enum class Activation { sigmoid, relu, gelu, exp, softplus };

/// Axis that gets reduced away: `rows` yields 1 x cols, `cols` yields rows x 1.
enum class Axis { rows, cols };

enum class Reduction { sum, mean };

inline constexpr double kGeluCoeff = 0.044715;
inline constexpr double kBceEpsilon = 1e-7;

class Graph;

/// Backward rule for `Graph::custom`: receives the graph, the node's upstream
/// gradient and must call `Graph::accumulate` for each input that needs it.
using BackwardFn = std::function<void(Graph&, const Tensor& upstream)>;

/// Reverse-mode tape over 2-D tensors.
///
/// Nodes are appended in evaluation order, so insertion order is a valid
/// topological order and `backward` simply walks the tape in reverse. A
/// graph supports exactly one backward sweep; build a fresh graph per step.
///
/// Binary elementwise ops broadcast per dimension when one side has extent 1
/// (row vectors, column vectors and 1x1 scalars).
class Graph {
 public:
  NodeId parameter(Tensor value);
  NodeId constant(Tensor value);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId scale(NodeId a, double factor);
  NodeId one_minus(NodeId a);

  NodeId matmul(NodeId a, NodeId b);

  NodeId activation(Activation kind, NodeId x);
  NodeId sigmoid(NodeId x) { return activation(Activation::sigmoid, x); }
  NodeId relu(NodeId x) { return activation(Activation::relu, x); }
  NodeId gelu(NodeId x) { return activation(Activation::gelu, x); }
  NodeId exp(NodeId x) { return activation(Activation::exp, x); }
  NodeId softplus(NodeId x) { return activation(Activation::softplus, x); }

  /// Row-wise softmax of `temperature * x`, max-subtracted.
  NodeId softmax_rows(NodeId x, double temperature);

  NodeId reduce(Reduction kind, NodeId x, Axis axis);
  NodeId sum(NodeId x, Axis axis) { return reduce(Reduction::sum, x, axis); }
  NodeId mean(NodeId x, Axis axis) { return reduce(Reduction::mean, x, axis); }
  /// Sum of all entries as a 1x1 node.
  NodeId sum_all(NodeId x);

  NodeId concat_cols(NodeId a, NodeId b);
  NodeId slice_rows(NodeId a, std::size_t begin, std::size_t count);
  NodeId transpose(NodeId a);

  /// Mean binary cross-entropy with predictions clamped to [eps, 1 - eps].
  NodeId bce_loss(NodeId pred, const Tensor& target);

  NodeId custom(std::vector<NodeId> inputs, Tensor value, BackwardFn backward);

  const Tensor& value(NodeId id) const;
  /// Gradient accumulated for `id`; zeros if nothing flowed into it.
  Tensor grad(NodeId id) const;
  OpKind kind(NodeId id) const;
  bool requires_grad(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }

  void accumulate(NodeId id, const Tensor& g);

  void backward(NodeId loss);

 private:
  struct Node {
    OpKind op;
    std::vector<NodeId> inputs{};
    Tensor value{};
    Tensor grad{};
    bool requires_grad = false;
    double param = 0.0;
    std::size_t offset = 0;
    Tensor aux{};
    BackwardFn custom_backward{};
  };

  NodeId push(Node node);
  Node& at(NodeId id);
  const Node& at(NodeId id) const;
  NodeId binary(OpKind op, NodeId a, NodeId b);
  void backprop_node(const Node& node, const Tensor& g);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace lnu
