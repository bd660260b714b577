#include "aisgd/checks.hpp"

#include "aisgd/experiment.hpp"
#include "aisgd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace aisgd {

namespace {

struct Check {
  const char* name;
  std::function<CheckResult(const CheckOptions&)> run;
};

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

Vector gaussian_vector(Rng& rng, Eigen::Index p, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = normal(rng);
  return v;
}

CheckResult fixed_point_check(const CheckOptions& opt) {
  Rng rng = make_rng(opt.seed, 11);
  std::uniform_int_distribution<int> dim(1, 50);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = dim(rng);
    Sample s{FeatureVector(gaussian_vector(rng, p)), normal(rng)};
    const Vector theta = gaussian_vector(rng, p);
    const double gamma = log_uniform(rng, 1e-4, 10.0);
    const auto fp = solve_fixed_point(GlmLoss::squared(), s, theta, gamma, opt.fixed_point);
    const double expected = 1.0 / (1.0 + 2.0 * gamma * s.x.squared_norm());
    worst = std::max(worst, std::abs(fp.s_n - expected));
  }
  return {"fixed_point", worst <= 1e-10,
          "max |s_n - 1/(1+2 gamma |x|^2)| = " + format_real(worst) + " (limit 1e-10)"};
}

CheckResult proximal_check(const CheckOptions& opt) {
  Rng rng = make_rng(opt.seed, 12);
  std::uniform_int_distribution<int> dim(1, 20);
  std::uniform_int_distribution<int> family(0, 3);
  std::uniform_int_distribution<int> count(0, 5);
  std::bernoulli_distribution coin;
  std::normal_distribution<double> normal;
  double worst_residual = 0.0;
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = dim(rng);
    GlmLoss loss;
    double y;
    switch (family(rng)) {
      case 0:
        loss = GlmLoss::squared();
        y = normal(rng);
        break;
      case 1:
        loss = GlmLoss::logistic();
        y = coin(rng) ? 1.0 : -1.0;
        break;
      case 2:
        loss = GlmLoss::poisson();
        y = count(rng);
        break;
      default:
        loss = GlmLoss::smoothed_hinge(0.5);
        y = coin(rng) ? 1.0 : -1.0;
        break;
    }
    if (coin(rng)) loss = loss.with_lambda(log_uniform(rng, 1e-6, 1.0));
    const double scale = loss.family == LossFamily::poisson ? 0.3 : 1.0;
    Sample s{FeatureVector(gaussian_vector(rng, p, scale)), y};
    const Vector prev = gaussian_vector(rng, p, scale);
    const double gamma = log_uniform(rng, 1e-4, 10.0);

    auto state = OptimizerState::start(Algorithm::isgd, prev);
    const Vector implicit = implicit_step(state, s, gamma, loss, opt.fixed_point).theta;
    const Vector explicit_point = explicit_step(state, s, gamma, loss).theta;

    const Vector residual = implicit - prev + gamma * full_gradient(loss, s, implicit);
    worst_residual = std::max(worst_residual, residual.norm());
    const double at_new = proximal_objective(loss, s, prev, implicit, gamma);
    const double slack = 1e-12 * (1.0 + std::abs(at_new));
    if (at_new > proximal_objective(loss, s, prev, prev, gamma) + slack ||
        at_new > proximal_objective(loss, s, prev, explicit_point, gamma) + slack) {
      ++violations;
    }
  }
  return {"proximal", violations == 0 && worst_residual <= 1e-8,
          std::to_string(violations) + " objective violations, max residual " +
              format_real(worst_residual) + " (limit 1e-8)"};
}

CheckResult averaging_check(const CheckOptions& opt) {
  Rng rng = make_rng(opt.seed, 13);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  const Eigen::Index p = 8;
  auto state = OptimizerState::start(Algorithm::aisgd, Vector::Zero(p));
  Vector sum = Vector::Zero(p);
  for (int i = 0; i < 1000; ++i) {
    Vector theta(p);
    for (Eigen::Index k = 0; k < p; ++k) theta[k] = u(rng);
    sum += theta;
    state.theta = theta;
    ++state.n;
    state = update_average(std::move(state));
  }
  const Vector batch = sum / 1000.0;
  const double rel = (state.theta_bar - batch).norm() / batch.norm();
  return {"averaging", rel <= 1e-12, "relative gap " + format_real(rel) + " (limit 1e-12)"};
}

CheckResult contraction_check(const CheckOptions& opt) {
  Rng rng = make_rng(opt.seed, 14);
  std::normal_distribution<double> normal;
  const double theta_star = 1.5;
  const auto schedule = LearningRate::polynomial(1.0, 2.0 / 3.0);
  auto state = OptimizerState::start(Algorithm::isgd, Vector::Constant(1, -4.0));
  int violations = 0;
  for (int n = 1; n <= 1000; ++n) {
    double x = normal(rng);
    if (x == 0.0) x = 1.0;
    const Sample s{FeatureVector(Vector::Constant(1, x)), x * theta_star};
    const double gamma = schedule.rate(n);
    const double before = std::pow(state.theta[0] - theta_star, 2);
    state = implicit_step(std::move(state), s, gamma, GlmLoss::squared(), opt.fixed_point);
    const double after = std::pow(state.theta[0] - theta_star, 2);
    if (after > before / (1.0 + 2.0 * gamma * x * x) + 1e-12) ++violations;
  }
  return {"contraction", violations == 0, std::to_string(violations) + " violating steps of 1000"};
}

CheckResult step_bound_check(const CheckOptions& opt) {
  Rng rng = make_rng(opt.seed, 15);
  std::bernoulli_distribution coin;
  const Eigen::Index p = 10;
  const auto schedule = LearningRate::polynomial(5.0, 0.6);
  auto state = OptimizerState::start(Algorithm::isgd, Vector::Zero(p));
  int violations = 0;
  for (int n = 1; n <= 10000; ++n) {
    Sample s{FeatureVector(gaussian_vector(rng, p, 2.0)), coin(rng) ? 1.0 : -1.0};
    const double gamma = schedule.rate(n);
    const Vector prev = state.theta;
    state = implicit_step(std::move(state), s, gamma, GlmLoss::logistic(), opt.fixed_point);
    if ((state.theta - prev).norm() > 2.0 * gamma * std::sqrt(s.x.squared_norm()) + 1e-12) {
      ++violations;
    }
  }
  return {"step_bound", violations == 0,
          std::to_string(violations) + " violating steps of 10000"};
}

CheckResult decay_factor_check(const CheckOptions&) {
  const std::pair<double, double> presets[] = {{0.1, 0.5}, {1.0, 0.7}, {2.0, 1.0}};
  int violations = 0;
  for (auto [b1, beta] : presets) {
    const double k = std::log1p(b1) / b1;
    double log_product = 0.0;
    double sum = 0.0;
    for (int n = 1; n <= 10000; ++n) {
      const double b = b1 * std::pow(n, -beta);
      log_product -= std::log1p(b);
      sum += b;
      if (log_product > -k * sum + 1e-12) ++violations;
    }
  }
  return {"decay_factor", violations == 0,
          std::to_string(violations) + " violations over 3 presets x 10000 terms"};
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks{
      {"fixed_point", fixed_point_check}, {"proximal", proximal_check},
      {"averaging", averaging_check},     {"contraction", contraction_check},
      {"step_bound", step_bound_check},   {"decay_factor", decay_factor_check},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& c : registry()) out.emplace_back(c.name);
    return out;
  }();
  return names;
}

std::vector<CheckResult> run_checks(const CheckOptions& options, std::string_view filter) {
  std::vector<CheckResult> results;
  for (const auto& c : registry()) {
    if (!filter.empty() && std::string_view(c.name).find(filter) == std::string_view::npos) {
      continue;
    }
    try {
      results.push_back(c.run(options));
    } catch (const std::exception& e) {
      results.push_back({c.name, false, std::string("threw: ") + e.what()});
    }
  }
  if (results.empty()) {
    throw ValidationError("no check matches '" + std::string(filter) + "'");
  }
  return results;
}

}  // namespace aisgd
