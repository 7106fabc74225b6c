#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lnu/graph.hpp"
#include "lnu/random.hpp"
#include "lnu/tensor.hpp"

namespace lnu {

struct LnuConfig {
  std::size_t input_dim = 3;
  std::size_t units = 1;
  double beta = 10.0;
  bool trainable_beta = false;
  /// Divide the AND/OR branch outputs by sqrt(input_dim).
  bool normalize = false;
  bool include_negation = false;

  std::size_t output_width() const { return (include_negation ? 3 : 2) * units; }
};

/// Parameters of one LNU layer. Weight matrices are input_dim x units and
/// are not clamped; a trainable beta is stored as its softplus preimage.
struct LnuParams {
  LnuConfig config;
  Tensor w_and;
  Tensor w_or;
  Tensor w_not;     // empty unless config.include_negation
  Tensor beta_raw;  // 1x1, empty unless config.trainable_beta

  /// Gate weights uniform in [0.25, 0.75], negation weights zero.
  static LnuParams init(const LnuConfig& config, Rng& rng);
  static LnuParams fixed(const LnuConfig& config, Tensor w_and, Tensor w_or,
                         Tensor w_not = {});

  void validate() const;
  double beta() const;
};

double softplus_inverse(double y);

/// Graph handles for the parameters of one layer.
struct LnuNodes {
  NodeId w_and;
  NodeId w_or;
  std::optional<NodeId> w_not;
  std::optional<NodeId> beta_raw;
};

LnuNodes bind_parameters(Graph& graph, const LnuParams& params);
LnuNodes bind_constants(Graph& graph, const LnuParams& params);

/// Row-wise soft AND / soft OR of an n x d node -> n x 1. With `beta_raw`
/// the sharpness is softplus(beta_raw) instead of the fixed `beta`.
NodeId soft_and_rows(Graph& graph, NodeId z, double beta,
                     std::optional<NodeId> beta_raw = std::nullopt);
NodeId soft_or_rows(Graph& graph, NodeId z, double beta,
                    std::optional<NodeId> beta_raw = std::nullopt);

/// x: n x d  ->  n x 2o ([AND | OR]) or n x 3o ([AND | OR | NOT]).
///
/// Sample i, unit k of the AND branch is soft_and over j of x_ij * w_and[j,k];
/// the OR branch uses w_or with soft_or. The NOT branch is
/// 1 - sigmoid(x * w_not).
NodeId lnu_forward(Graph& graph, NodeId x, const LnuConfig& config, const LnuNodes& nodes);
NodeId lnu_forward(Graph& graph, NodeId x, const LnuParams& params);

/// Elementwise soft_or(1 - a, b) at sharpness `beta` (fixed) or
/// softplus(beta_raw) (trainable).
NodeId soft_imply(Graph& graph, NodeId a, NodeId b, double beta,
                  std::optional<NodeId> beta_raw = std::nullopt);

enum class ResidualMode { none, soft_imply };

class LnuStack {
 public:
  /// Throws ConfigError if layer widths do not chain, or if a residual
  /// layer's output width differs from its input width.
  LnuStack(std::vector<LnuParams> layers, ResidualMode residual);

  /// Layers of the given unit counts. `normalize` defaults to on for
  /// stacks deeper than one layer.
  static LnuStack build(const LnuConfig& base, std::span<const std::size_t> units,
                        ResidualMode residual, Rng& rng,
                        std::optional<bool> normalize = std::nullopt);

  const std::vector<LnuParams>& layers() const { return layers_; }
  ResidualMode residual() const { return residual_; }
  std::size_t input_dim() const { return layers_.front().config.input_dim; }
  std::size_t output_width() const { return layers_.back().config.output_width(); }

 private:
  std::vector<LnuParams> layers_;
  ResidualMode residual_;
};

NodeId lnu_stack_forward(Graph& graph, NodeId x, const LnuStack& stack,
                         std::span<const LnuNodes> nodes);
NodeId lnu_stack_forward(Graph& graph, NodeId x, const LnuStack& stack);

}  // namespace lnu
