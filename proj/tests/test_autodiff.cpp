#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lnu/gradcheck.hpp"
#include "lnu/graph.hpp"
#include "lnu/random.hpp"
#include "lnu/verification.hpp"

using namespace lnu;

namespace {

Tensor eval(std::function<NodeId(Graph&)> build) {
  Graph g;
  return g.value(build(g));
}

}  // namespace

TEST(Tensor, ConstructionChecksSize) {
  EXPECT_THROW(Tensor(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  const Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(1, 2), 6.0);
  EXPECT_EQ(t.transposed()(2, 1), 6.0);
  EXPECT_THROW(t.item(), ShapeError);
}

TEST(Graph, ElementwiseExamples) {
  EXPECT_EQ(eval([](Graph& g) {
              return g.add(g.constant(Tensor::from_rows({{1, 2}})), g.constant(Tensor::from_rows({{3, 4}})));
            }),
            Tensor::from_rows({{4, 6}}));
  EXPECT_NEAR(eval([](Graph& g) { return g.one_minus(g.constant(Tensor::scalar(0.3))); }).item(), 0.7, 1e-15);
  EXPECT_EQ(eval([](Graph& g) {
              return g.mul(g.constant(Tensor::from_rows({{2, 0}})), g.constant(Tensor::from_rows({{5, 7}})));
            }),
            Tensor::from_rows({{10, 0}}));
}

TEST(Graph, RowBroadcastAndShapeErrors) {
  const Tensor out = eval([](Graph& g) {
    return g.add(g.constant(Tensor::from_rows({{1, 2}, {3, 4}})), g.constant(Tensor::from_rows({{10, 20}})));
  });
  EXPECT_EQ(out, Tensor::from_rows({{11, 22}, {13, 24}}));
  Graph g;
  const auto a = g.constant(Tensor(2, 3));
  EXPECT_THROW(g.add(a, g.constant(Tensor(3, 2))), ShapeError);
  EXPECT_THROW(g.matmul(a, g.constant(Tensor(2, 2))), ShapeError);
  EXPECT_THROW(g.concat_cols(a, g.constant(Tensor(3, 1))), ShapeError);
}

TEST(Graph, MatmulExamples) {
  const Tensor m = Tensor::from_rows({{1.5, -2}, {3, 4}});
  EXPECT_EQ(eval([&](Graph& g) { return g.matmul(g.constant(Tensor::from_rows({{1, 0}, {0, 1}})), g.constant(m)); }), m);
  EXPECT_EQ(eval([](Graph& g) {
              return g.matmul(g.constant(Tensor::from_rows({{1, 2}})), g.constant(Tensor::from_rows({{3}, {4}})));
            }).item(),
            11.0);
}

TEST(Graph, ActivationExamples) {
  EXPECT_EQ(eval([](Graph& g) { return g.sigmoid(g.constant(Tensor::scalar(0))); }).item(), 0.5);
  EXPECT_EQ(eval([](Graph& g) { return g.relu(g.constant(Tensor::scalar(-3))); }).item(), 0.0);
  // tanh approximation of GeLU, evaluated directly
  const double x = 0.7;
  const double gelu = 0.5 * x * (1 + std::tanh(std::sqrt(2 / M_PI) * (x + 0.044715 * x * x * x)));
  EXPECT_NEAR(eval([&](Graph& g) { return g.gelu(g.constant(Tensor::scalar(x))); }).item(), gelu, 1e-15);
  const Tensor big = eval([](Graph& g) { return g.sigmoid(g.constant(Tensor::from_rows({{-800, 800}}))); });
  EXPECT_TRUE(big.all_finite());
  EXPECT_EQ(big(0, 1), 1.0);
}

TEST(Graph, SoftmaxExamples) {
  for (double beta : {0.0, 1.0, 37.0}) {
    const Tensor s = eval([&](Graph& g) { return g.softmax_rows(g.constant(Tensor::from_rows({{4, 4, 4}})), beta); });
    for (double v : s.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  }
  const Tensor uniform = eval([](Graph& g) { return g.softmax_rows(g.constant(Tensor::from_rows({{0, 1}})), 0); });
  EXPECT_EQ(uniform, Tensor::from_rows({{0.5, 0.5}}));
  const Tensor sharp = eval([](Graph& g) { return g.softmax_rows(g.constant(Tensor::from_rows({{0, 1}})), 100); });
  const double low = 1.0 / (1.0 + std::exp(100.0));
  EXPECT_NEAR(sharp(0, 0), low, 1e-9);
  EXPECT_NEAR(sharp(0, 1), 1.0 - low, 1e-9);
  Graph g;
  EXPECT_THROW(g.softmax_rows(g.constant(Tensor(1, 2)), -1.0), ValidationError);
}

TEST(Graph, ReduceAndConcat) {
  EXPECT_EQ(eval([](Graph& g) { return g.sum(g.constant(Tensor::from_rows({{1, 2, 3}})), Axis::cols); }).item(), 6.0);
  EXPECT_EQ(eval([](Graph& g) { return g.mean(g.constant(Tensor(4, 5, 2.5)), Axis::rows); }), Tensor(1, 5, 2.5));
  EXPECT_EQ(eval([](Graph& g) {
              return g.concat_cols(g.constant(Tensor::scalar(1)), g.constant(Tensor::scalar(2)));
            }),
            Tensor::from_rows({{1, 2}}));
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(eval([&](Graph& g) { return g.concat_cols(g.constant(a), g.constant(Tensor(2, 0))); }), a);
}

TEST(Graph, BceLoss) {
  const double eps = 1e-7;
  EXPECT_NEAR(eval([&](Graph& g) { return g.bce_loss(g.constant(Tensor::scalar(1 - eps)), Tensor::scalar(1)); }).item(),
              0.0, 1e-6);
  EXPECT_NEAR(eval([](Graph& g) { return g.bce_loss(g.constant(Tensor::scalar(0.5)), Tensor::scalar(1)); }).item(),
              std::log(2.0), 1e-15);
  // exact 0 and 1 predictions are clamped, not infinite
  const double clamped =
      eval([](Graph& g) { return g.bce_loss(g.constant(Tensor::scalar(0.0)), Tensor::scalar(1)); }).item();
  EXPECT_NEAR(clamped, -std::log(eps), 1e-9);
  Graph g;
  EXPECT_THROW(g.bce_loss(g.constant(Tensor::scalar(0.5)), Tensor::scalar(0.5)), ValidationError);
}

TEST(Backward, Examples) {
  {
    Graph g;
    const auto w = g.parameter(Tensor::from_rows({{0.3, -2}}));
    g.backward(g.sum(w, Axis::cols));
    EXPECT_EQ(g.grad(w), Tensor::from_rows({{1, 1}}));
  }
  {
    Graph g;
    const auto w = g.parameter(Tensor::scalar(3));
    g.backward(g.sum_all(g.mul(w, w)));
    EXPECT_EQ(g.grad(w).item(), 6.0);
  }
}

TEST(Backward, FanOutAccumulates) {
  Graph g;
  const auto x = g.parameter(Tensor::scalar(2));
  const auto y = g.add(g.scale(x, 3), g.mul(x, x));  // 3x + x^2
  g.backward(y);
  EXPECT_EQ(g.grad(x).item(), 3.0 + 4.0);
}

TEST(Backward, RejectsNonScalarAndSecondCall) {
  Graph g;
  const auto w = g.parameter(Tensor(1, 2, 1.0));
  EXPECT_THROW(g.backward(w), ShapeError);
  const auto loss = g.sum_all(w);
  g.backward(loss);
  EXPECT_THROW(g.backward(loss), std::logic_error);
  EXPECT_THROW(g.constant(Tensor::scalar(1)), std::logic_error);
}

TEST(Backward, ConstantsGetNoGradient) {
  Graph g;
  const auto c = g.constant(Tensor::scalar(4));
  const auto w = g.parameter(Tensor::scalar(2));
  g.backward(g.mul(c, w));
  EXPECT_FALSE(g.requires_grad(c));
  EXPECT_EQ(g.grad(c).item(), 0.0);
  EXPECT_EQ(g.grad(w).item(), 4.0);
}

TEST(Backward, DeterministicAcrossBuilds) {
  auto run = [] {
    Rng rng(99);
    Tensor x(4, 3);
    for (double& v : x.data()) v = rng.uniform();
    Graph g;
    const auto p = g.parameter(x);
    g.backward(g.mean(g.sum(g.softmax_rows(g.gelu(p), 5.0), Axis::rows), Axis::cols));
    return g.grad(p);
  };
  EXPECT_EQ(run(), run());
}

TEST(GradCheck, PolynomialIsExact) {
  const std::vector<Tensor> params{Tensor::scalar(3)};
  const auto r = finite_difference_check(
      [](Graph& g, std::span<const NodeId> p) { return g.sum_all(g.mul(p[0], p[0])); }, params);
  EXPECT_LE(r.max_rel_error, 1e-9);
  EXPECT_THROW(finite_difference_check([](Graph& g, std::span<const NodeId> p) { return p[0]; }, params, 0.0),
               ValidationError);
}

TEST(GradCheck, WrongBackwardIsCaught) {
  // y = x^2 with a backward that reports x instead of 2x
  const std::vector<Tensor> params{Tensor::from_rows({{0.4, -1.3}})};
  const auto r = finite_difference_check(
      [](Graph& g, std::span<const NodeId> p) {
        const NodeId x = p[0];
        Tensor v = g.value(x);
        for (double& e : v.data()) e *= e;
        const NodeId y = g.custom({x}, v, [x](Graph& gr, const Tensor& up) {
          Tensor d = gr.value(x);
          for (std::size_t i = 0; i < d.size(); ++i) d[i] *= up[i];
          gr.accumulate(x, d);
        });
        return g.sum_all(y);
      },
      params);
  EXPECT_GT(r.max_rel_error, 0.1);
}

TEST(GradCheck, StandardCasesPassAtFewPoints) {
  const auto cases = standard_gradcheck_cases();
  EXPECT_GE(cases.size(), 10u);
  for (const auto& c : run_gradchecks(cases, 5, 123)) {
    EXPECT_TRUE(c.passed) << c.name << " " << c.value;
  }
}
