#include "lnu/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace lnu {

namespace {

double evaluate(const ScalarGraphFn& fn, std::span<const Tensor> params) {
  Graph graph;
  std::vector<NodeId> ids;
  ids.reserve(params.size());
  for (const Tensor& p : params) ids.push_back(graph.constant(p));
  return graph.value(fn(graph, ids)).item();
}

}  // namespace

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport finite_difference_check(const ScalarGraphFn& fn, std::span<const Tensor> params,
                                        double h) {
  if (!(h > 0.0)) throw ValidationError("finite difference step must be positive");

  Graph graph;
  std::vector<NodeId> ids;
  ids.reserve(params.size());
  for (const Tensor& p : params) ids.push_back(graph.parameter(p));
  graph.backward(fn(graph, ids));

  GradCheckReport report;
  std::vector<Tensor> probe(params.begin(), params.end());
  for (std::size_t p = 0; p < probe.size(); ++p) {
    const Tensor analytic = graph.grad(ids[p]);
    for (std::size_t i = 0; i < probe[p].size(); ++i) {
      const double saved = probe[p][i];
      auto at = [&](double offset) {
        probe[p][i] = saved + offset;
        return evaluate(fn, probe);
      };
      const double numeric = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
      probe[p][i] = saved;
      const double err = relative_error(analytic[i], numeric);
      if (err > report.max_rel_error || std::isnan(err)) {
        report = GradCheckReport{err, p, i, analytic[i], numeric};
      }
    }
  }
  return report;
}

}  // namespace lnu
