#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace aisgd {

enum class LossFamily { squared, logistic, poisson, smoothed_hinge };

/// Loss of linear-predictor form L(theta, (x, y)) = l(x^T theta, y), plus an
/// optional ridge term lambda * |theta|^2 / 2 that the solvers apply.
///
/// Families, with u the linear predictor and m = y * u the margin:
///   squared         (y - u)^2
///   logistic        log(1 + exp(-m)),           y in {-1, +1}
///   poisson         exp(u) - y * u,             y in {0, 1, 2, ...}
///   smoothed_hinge  0 for m >= 1, (1 - m)^2 / (2 delta) on [1 - delta, 1],
///                   1 - m - delta / 2 below,    y in {-1, +1}
///
/// Derivatives are with respect to u, so grad L = derivative(u, y) * x.
struct GlmLoss {
  LossFamily family = LossFamily::squared;
  double delta = 0.5;
  double lambda = 0.0;

  static GlmLoss squared() { return {LossFamily::squared}; }
  static GlmLoss logistic() { return {LossFamily::logistic}; }
  static GlmLoss poisson() { return {LossFamily::poisson}; }
  static GlmLoss smoothed_hinge(double delta = 0.5);

  /// "squared" | "logistic" | "poisson" | "hinge" | "hinge:<delta>".
  static GlmLoss parse(std::string_view name, double lambda = 0.0);
  std::string name() const;

  GlmLoss with_lambda(double l) const;

  double value(double u, double y) const;
  double derivative(double u, double y) const;
  double second_derivative(double u, double y) const;

  /// sup_u |derivative(u, y)| when finite for every valid y.
  std::optional<double> derivative_bound() const;

  bool label_valid(double y) const;
};

inline double loss_value(const GlmLoss& loss, double u, double y) { return loss.value(u, y); }
inline double link_derivative(const GlmLoss& loss, double u, double y) {
  return loss.derivative(u, y);
}
inline double second_derivative(const GlmLoss& loss, double u, double y) {
  return loss.second_derivative(u, y);
}

}  // namespace aisgd
