#include "lnu/soft_logic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lnu::logic {

namespace {

void require_nonempty(std::span<const double> z, const char* op) {
  if (z.empty()) throw ValidationError(fmt::format("{}: empty input vector", op));
}

void require_same_length(std::span<const double> x, std::span<const double> w, const char* op) {
  if (x.size() != w.size()) {
    throw ShapeError(fmt::format("{}: length mismatch ({} vs {})", op, x.size(), w.size()));
  }
}

// sum_i softmax(t z)_i z_i with max-subtraction.
double gated_mean(std::span<const double> z, double t) {
  double hi = t * z[0];
  for (double v : z) hi = std::max(hi, t * v);
  double num = 0.0;
  double den = 0.0;
  for (double v : z) {
    const double e = std::exp(t * v - hi);
    num += e * v;
    den += e;
  }
  return num / den;
}

double apply(LnnActivation f, double v) {
  return f == LnnActivation::clamp ? std::clamp(v, 0.0, 1.0) : std::max(v, 0.0);
}

void require_lnn_params(std::span<const double> w, double bias_b, const char* op) {
  for (double wi : w) {
    if (wi < 0.0) throw ValidationError(fmt::format("{}: negative weight {}", op, wi));
  }
  if (bias_b < 0.0) throw ValidationError(fmt::format("{}: negative bias {}", op, bias_b));
}

}  // namespace

Sharpness::Sharpness(double beta) : beta_(beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError(fmt::format("sharpness must be finite and >= 0, got {}", beta));
  }
}

double godel_and(std::span<const double> z) {
  require_nonempty(z, "godel_and");
  return *std::min_element(z.begin(), z.end());
}

double godel_or(std::span<const double> z) {
  require_nonempty(z, "godel_or");
  return *std::max_element(z.begin(), z.end());
}

double soft_and(std::span<const double> z, Sharpness beta) {
  require_nonempty(z, "soft_and");
  return gated_mean(z, -beta.value());
}

double soft_or(std::span<const double> z, Sharpness beta) {
  require_nonempty(z, "soft_or");
  return gated_mean(z, beta.value());
}

std::vector<double> weighted_gate(std::span<const double> x, std::span<const double> w) {
  require_same_length(x, w, "weighted_gate");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * w[i];
  return z;
}

double soft_not(double x, NegationMode mode, std::optional<double> w_not) {
  if (mode == NegationMode::affine) return 1.0 - x;
  if (!w_not) throw ValidationError("soft_not: learned mode needs a negation weight");
  return 1.0 - 1.0 / (1.0 + std::exp(-*w_not * x));
}

std::vector<double> soft_imply(std::span<const double> a, std::span<const double> b,
                               Sharpness beta) {
  require_same_length(a, b, "soft_imply");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pair[2] = {1.0 - a[k], b[k]};
    out[k] = soft_or(pair, beta);
  }
  return out;
}

double nln_and(std::span<const double> x, std::span<const double> w) {
  require_same_length(x, w, "nln_and");
  double y = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) y *= 1.0 - w[i] * (1.0 - x[i]);
  return y;
}

double nln_or(std::span<const double> x, std::span<const double> w) {
  require_same_length(x, w, "nln_or");
  double y = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) y *= 1.0 - w[i] * x[i];
  return 1.0 - y;
}

double lnn_and(std::span<const double> x, std::span<const double> w, double bias_b,
               LnnActivation f) {
  require_same_length(x, w, "lnn_and");
  require_lnn_params(w, bias_b, "lnn_and");
  double s = bias_b;
  for (std::size_t i = 0; i < x.size(); ++i) s -= w[i] * (1.0 - x[i]);
  return apply(f, s);
}

double lnn_or(std::span<const double> x, std::span<const double> w, double bias_b,
              LnnActivation f) {
  require_same_length(x, w, "lnn_or");
  require_lnn_params(w, bias_b, "lnn_or");
  double s = 1.0 - bias_b;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
  return apply(f, s);
}

}  // namespace lnu::logic
