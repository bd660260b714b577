#include "aisgd/solver.hpp"

#include "aisgd/core.hpp"
#include "aisgd/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace aisgd {

namespace {

constexpr std::array<std::pair<Algorithm, const char*>, 5> kAlgorithms{{
    {Algorithm::sgd, "sgd"},
    {Algorithm::isgd, "isgd"},
    {Algorithm::asgd, "asgd"},
    {Algorithm::aisgd, "aisgd"},
    {Algorithm::adagrad, "adagrad"},
}};

void check_dims(const OptimizerState& state, const Sample& sample) {
  if (static_cast<std::size_t>(state.theta.size()) != sample.x.dim()) {
    throw ValidationError("sample dimension " + std::to_string(sample.x.dim()) +
                          " does not match parameter dimension " +
                          std::to_string(state.theta.size()));
  }
}

void check_rate(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("learning rate must be finite and non-negative");
  }
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kAlgorithms) {
    if (name == n) return a;
  }
  throw ValidationError("unknown algorithm '" + std::string(name) +
                        "'; valid algorithms: " + valid_algorithm_names());
}

std::string algorithm_name(Algorithm a) {
  for (const auto& [alg, n] : kAlgorithms) {
    if (alg == a) return n;
  }
  return "?";
}

std::string valid_algorithm_names() {
  std::string out;
  for (const auto& [a, n] : kAlgorithms) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

OptimizerState OptimizerState::start(Algorithm algorithm, Vector theta0) {
  OptimizerState s;
  s.algorithm = algorithm;
  s.theta = std::move(theta0);
  if (is_averaged(algorithm)) s.theta_bar = s.theta;
  if (algorithm == Algorithm::adagrad) s.adagrad_g = Vector::Zero(s.theta.size());
  return s;
}

const Vector& OptimizerState::estimate() const {
  return is_averaged(algorithm) && theta_bar.size() == theta.size() ? theta_bar : theta;
}

FixedPointResult solve_fixed_point(const GlmLoss& loss, const Sample& sample,
                                   const Vector& theta_prev, double gamma,
                                   const FixedPointOptions& options) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("fixed-point solve needs a positive finite learning rate");
  }
  if (static_cast<std::size_t>(theta_prev.size()) != sample.x.dim()) {
    throw ValidationError("sample dimension does not match parameter dimension");
  }

  FixedPointResult r;
  r.u0 = sample.x.dot(theta_prev);
  r.c = sample.x.squared_norm();

  const double shrink = 1.0 + gamma * loss.lambda;
  const double a = r.u0 / shrink;
  const double c = r.c / shrink;
  const double y = sample.y;
  auto g = [&](double v) { return -loss.derivative(v, y); };
  auto f = [&](double u) { return u - gamma * g(a + u * c); };

  const double width = gamma * g(a);
  if (width == 0.0) {
    r.u_star = 0.0;
    r.s_n = 1.0;
    return r;
  }
  if (r.c == 0.0) {
    r.u_star = width;
    r.s_n = 1.0;
    return r;
  }

  const double tol = options.tolerance * std::max(1.0, std::abs(width));
  double lo = std::min(0.0, width);
  double hi = std::max(0.0, width);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo > tol || f_hi < -tol) {
    throw FixedPointError(FixedPointError::Kind::bracket_violation, std::min(f_lo, -f_hi),
                          "implicit update root lies outside [" + format_real(lo) + ", " +
                              format_real(hi) + "]; is the loss convex in u?");
  }

  const double stop_width = options.tolerance * 1e-6 * std::abs(width);
  int it = 0;
  while (it < options.max_iterations && hi - lo > stop_width && f_lo < 0.0 && f_hi > 0.0) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    ++it;
    const double fm = f(mid);
    if (fm < 0.0) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }

  double u = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  double fu = std::min(std::abs(f_lo), std::abs(f_hi));
  if (it > 0 && lo < hi) {
    const double mid = lo + 0.5 * (hi - lo);
    const double fm = std::abs(f(mid));
    if (fm < fu) {
      u = mid;
      fu = fm;
    }
  }

  r.u_star = u;
  r.iterations = it;
  r.residual = fu;
  r.s_n = u / width;
  if (!(fu <= tol)) {
    throw FixedPointError(FixedPointError::Kind::no_convergence, fu,
                          "implicit update did not converge: residual " + format_real(fu) +
                              " after " + std::to_string(it) + " bisection steps");
  }
  return r;
}

OptimizerState explicit_step(OptimizerState state, const Sample& sample, double gamma,
                             const GlmLoss& loss) {
  check_dims(state, sample);
  check_rate(gamma);
  const double d = loss.derivative(sample.x.dot(state.theta), sample.y);
  if (loss.lambda > 0.0) state.theta *= 1.0 - gamma * loss.lambda;
  sample.x.axpy(-gamma * d, state.theta);
  ++state.n;
  return state;
}

OptimizerState implicit_step(OptimizerState state, const Sample& sample, double gamma,
                             const GlmLoss& loss, const FixedPointOptions& options) {
  check_dims(state, sample);
  const auto fp = solve_fixed_point(loss, sample, state.theta, gamma, options);
  sample.x.axpy(fp.u_star, state.theta);
  if (loss.lambda > 0.0) state.theta /= 1.0 + gamma * loss.lambda;
  ++state.n;
  return state;
}

OptimizerState update_average(OptimizerState state) {
  if (state.n == 0) throw ValidationError("update_average needs at least one step");
  if (state.theta_bar.size() != state.theta.size()) {
    state.theta_bar = state.theta;
    return state;
  }
  state.theta_bar += (state.theta - state.theta_bar) / static_cast<double>(state.n);
  return state;
}

OptimizerState adagrad_step(OptimizerState state, const Sample& sample, double eta,
                            const GlmLoss& loss) {
  check_dims(state, sample);
  check_rate(eta);
  if (!state.adagrad_g) state.adagrad_g = Vector::Zero(state.theta.size());
  Vector& G = *state.adagrad_g;
  const double d = loss.derivative(sample.x.dot(state.theta), sample.y);

  auto update = [&](std::size_t i, double g) {
    if (g == 0.0) return;
    G[i] += g * g;
    state.theta[i] -= eta * g / (std::sqrt(G[i]) + kAdagradEpsilon);
  };

  if (loss.lambda == 0.0) {
    sample.x.for_each_nonzero([&](std::size_t i, double v) { update(i, d * v); });
  } else {
    Vector grad = loss.lambda * state.theta;
    sample.x.axpy(d, grad);
    for (Eigen::Index i = 0; i < grad.size(); ++i) update(static_cast<std::size_t>(i), grad[i]);
  }
  ++state.n;
  return state;
}

OptimizerState step(OptimizerState state, const Sample& sample, double rate,
                    const GlmLoss& loss, const FixedPointOptions& options) {
  switch (state.algorithm) {
    case Algorithm::sgd:
      return explicit_step(std::move(state), sample, rate, loss);
    case Algorithm::asgd:
      return update_average(explicit_step(std::move(state), sample, rate, loss));
    case Algorithm::isgd:
      return implicit_step(std::move(state), sample, rate, loss, options);
    case Algorithm::aisgd:
      return update_average(implicit_step(std::move(state), sample, rate, loss, options));
    case Algorithm::adagrad:
      return adagrad_step(std::move(state), sample, rate, loss);
  }
  return state;
}

Vector full_gradient(const GlmLoss& loss, const Sample& sample, const Vector& theta) {
  Vector grad = loss.lambda * theta;
  sample.x.axpy(loss.derivative(sample.x.dot(theta), sample.y), grad);
  return grad;
}

double proximal_objective(const GlmLoss& loss, const Sample& sample, const Vector& anchor,
                          const Vector& theta, double gamma) {
  return (theta - anchor).squaredNorm() / (2.0 * gamma) +
         loss.value(sample.x.dot(theta), sample.y) + 0.5 * loss.lambda * theta.squaredNorm();
}

bool is_diverged(const Vector& theta) {
  return !theta.allFinite() || theta.norm() > kDivergenceNorm;
}

}  // namespace aisgd
