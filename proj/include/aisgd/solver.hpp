#pragma once

#include "aisgd/features.hpp"
#include "aisgd/loss.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aisgd {

enum class Algorithm { sgd, isgd, asgd, aisgd, adagrad };

Algorithm parse_algorithm(std::string_view name);
std::string algorithm_name(Algorithm a);
/// Comma-separated list of accepted names, for error messages.
std::string valid_algorithm_names();

constexpr bool is_averaged(Algorithm a) { return a == Algorithm::asgd || a == Algorithm::aisgd; }
constexpr bool is_implicit(Algorithm a) { return a == Algorithm::isgd || a == Algorithm::aisgd; }

struct OptimizerState {
  Algorithm algorithm = Algorithm::sgd;
  Vector theta;
  /// Mean of theta_1..theta_n; only maintained for averaged algorithms.
  Vector theta_bar;
  std::uint64_t n = 0;
  std::optional<Vector> adagrad_g;

  static OptimizerState start(Algorithm algorithm, Vector theta0);

  /// theta_bar for averaged algorithms (theta before the first step),
  /// theta otherwise.
  const Vector& estimate() const;
};

class FixedPointError : public std::runtime_error {
 public:
  enum class Kind { bracket_violation, no_convergence };
  FixedPointError(Kind kind, double residual, const std::string& what)
      : std::runtime_error(what), kind_(kind), residual_(residual) {}
  Kind kind() const { return kind_; }
  double residual() const { return residual_; }

 private:
  Kind kind_;
  double residual_;
};

/// Solution of the scalar implicit-update equation
///
///   u = gamma * g((u0 + u * c) / (1 + gamma * lambda)),  g(v) = -l'(v, y),
///
/// after which theta_n = (theta_{n-1} + u * x) / (1 + gamma * lambda).
struct FixedPointResult {
  double u_star = 0.0;
  /// u_star / (gamma * g(u0 / (1 + gamma * lambda))), in (0, 1] unless the
  /// gradient vanishes (then 1).
  double s_n = 1.0;
  double u0 = 0.0;
  double c = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct FixedPointOptions {
  /// Residual tolerance, scaled by max(1, |bracket width|). Bisection also
  /// stops once the bracket shrinks below tolerance * 1e-6 of its start.
  double tolerance = 1e-12;
  int max_iterations = 200;
};

FixedPointResult solve_fixed_point(const GlmLoss& loss, const Sample& sample,
                                   const Vector& theta_prev, double gamma,
                                   const FixedPointOptions& options = {});

OptimizerState explicit_step(OptimizerState state, const Sample& sample, double gamma,
                             const GlmLoss& loss);

OptimizerState implicit_step(OptimizerState state, const Sample& sample, double gamma,
                             const GlmLoss& loss, const FixedPointOptions& options = {});

/// theta_bar <- theta_bar + (theta - theta_bar) / n
OptimizerState update_average(OptimizerState state);

inline constexpr double kAdagradEpsilon = 1e-8;

/// Diagonal AdaGrad: G_i += g_i^2, theta_i -= eta * g_i / (sqrt(G_i) + eps).
OptimizerState adagrad_step(OptimizerState state, const Sample& sample, double eta,
                            const GlmLoss& loss);

/// One step of `state.algorithm`, including averaging where it applies.
/// For AdaGrad `rate` is the base step eta.
OptimizerState step(OptimizerState state, const Sample& sample, double rate,
                    const GlmLoss& loss, const FixedPointOptions& options = {});

/// Gradient of loss + lambda |theta|^2 / 2 at theta, dense.
Vector full_gradient(const GlmLoss& loss, const Sample& sample, const Vector& theta);

/// (1 / (2 gamma)) |theta - anchor|^2 + l(x^T theta, y) + lambda |theta|^2 / 2
double proximal_objective(const GlmLoss& loss, const Sample& sample, const Vector& anchor,
                          const Vector& theta, double gamma);

inline constexpr double kDivergenceNorm = 1e12;

/// Non-finite component or norm above kDivergenceNorm.
bool is_diverged(const Vector& theta);

}  // namespace aisgd
