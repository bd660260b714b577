#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aisgd/core.hpp"
#include "aisgd/schedule.hpp"
#include "aisgd/solver.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace aisgd;
using aisgd::testing::gaussian;
using aisgd::testing::log_uniform;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

OptimizerState at(Algorithm a, Vector theta) { return OptimizerState::start(a, std::move(theta)); }

const GlmLoss kFamilies[] = {GlmLoss::squared(), GlmLoss::logistic(), GlmLoss::poisson(),
                             GlmLoss::smoothed_hinge(0.5)};

struct Case {
  GlmLoss loss;
  Sample sample;
  Vector theta;
  double gamma;
};

Case random_case(std::mt19937_64& rng, bool regularize) {
  std::uniform_int_distribution<int> fam(0, 3), dim(1, 30);
  std::bernoulli_distribution sparse;
  const auto p = dim(rng);
  GlmLoss loss = kFamilies[fam(rng)];
  if (regularize) loss = loss.with_lambda(log_uniform(rng, 1e-4, 1.0));
  Vector x = gaussian(rng, p, 1.0 / std::sqrt(p));
  FeatureVector fx(x);
  if (sparse(rng)) {
    SparseVector s{static_cast<std::size_t>(p), {}, {}};
    for (Eigen::Index i = 0; i < p; i += 2) {
      s.index.push_back(static_cast<std::uint32_t>(i));
      s.value.push_back(x[i]);
    }
    fx = FeatureVector(s);
  }
  return {loss, Sample{fx, testing::random_label(rng, loss.family)},
          gaussian(rng, p, 1.0 / std::sqrt(p)), log_uniform(rng, 1e-4, 10.0)};
}

}  // namespace

TEST_CASE("fixed point: squared loss example") {
  const Sample s{vec({1.0, 0.0}), 1.0};
  const auto r = solve_fixed_point(GlmLoss::squared(), s, vec({0.0, 0.0}), 1.0);
  CHECK(r.u_star == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(r.s_n == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r.u0 == 0.0);
  CHECK(r.c == 1.0);

  const auto next = implicit_step(at(Algorithm::isgd, vec({0.0, 0.0})), s, 1.0, GlmLoss::squared());
  CHECK(next.theta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(next.theta[1] == 0.0);
  CHECK(next.n == 1);

  const Vector oracle =
      testing::prox_newton(GlmLoss::squared(), vec({1.0, 0.0}), 1.0, vec({0.0, 0.0}), 1.0);
  CHECK((next.theta - oracle).norm() <= 1e-12);
}

TEST_CASE("fixed point: logistic matches scalar bisection oracle") {
  // u = 2 * sigmoid(-u): theta = 0, x = e1, y = +1, gamma = 2.
  const Sample s{vec({1.0}), 1.0};
  const auto r = solve_fixed_point(GlmLoss::logistic(), s, vec({0.0}), 2.0);
  const double oracle =
      testing::bisect([](double u) { return u - 2.0 / (1.0 + std::exp(u)); }, 0.0, 1.0);
  CHECK(std::abs(r.u_star - oracle) <= 1e-12);
  CHECK(r.s_n > 0.0);
  CHECK(r.s_n <= 1.0);
}

TEST_CASE("fixed point: zero gradient gives zero step") {
  const Sample s{vec({1.0, 2.0}), 3.0};
  const Vector theta = vec({1.0, 1.0});  // x^T theta = y
  const auto r = solve_fixed_point(GlmLoss::squared(), s, theta, 0.7);
  CHECK(r.u_star == 0.0);
  CHECK(r.iterations == 0);
  const auto next = implicit_step(at(Algorithm::isgd, theta), s, 0.7, GlmLoss::squared());
  CHECK(next.theta == theta);

  // Hinge flat region.
  const Sample h{vec({2.0}), 1.0};
  CHECK(solve_fixed_point(GlmLoss::smoothed_hinge(), h, vec({3.0}), 5.0).u_star == 0.0);
}

TEST_CASE("implicit step: vanishing rate matches explicit step") {
  const Sample s{vec({0.3, -1.2, 0.5}), 2.0};
  const Vector theta0 = Vector::Zero(3);
  const double gamma = 1e-12;
  for (const auto& loss : {GlmLoss::squared(), GlmLoss::logistic()}) {
    const double y = loss.family == LossFamily::logistic ? 1.0 : 2.0;
    const Sample sy{s.x, y};
    const auto imp = implicit_step(at(Algorithm::isgd, theta0), sy, gamma, loss);
    const auto exp = explicit_step(at(Algorithm::sgd, theta0), sy, gamma, loss);
    const double grad = full_gradient(loss, sy, theta0).norm();
    CHECK((imp.theta - exp.theta).norm() <= 1e-20 * (1.0 + grad));
  }
}

TEST_CASE("implicit step: zero feature vector") {
  const Sample s{Vector(Vector::Zero(3)), 1.0};
  const Vector theta = vec({1.0, -2.0, 0.5});
  CHECK(implicit_step(at(Algorithm::isgd, theta), s, 3.0, GlmLoss::squared()).theta == theta);
  const auto reg = implicit_step(at(Algorithm::isgd, theta), s, 3.0,
                                 GlmLoss::squared().with_lambda(0.5));
  CHECK((reg.theta - theta / 2.5).norm() <= 1e-15);
}

TEST_CASE("explicit step examples") {
  const Sample s{vec({1.0, 0.0}), 1.0};
  const auto next = explicit_step(at(Algorithm::sgd, vec({0.0, 0.0})), s, 1.0, GlmLoss::squared());
  CHECK(next.theta == vec({2.0, 0.0}));
  CHECK(next.n == 1);

  const Sample flat{vec({1.0, 1.0}), 2.0};
  const Vector theta = vec({1.0, 1.0});
  CHECK(explicit_step(at(Algorithm::sgd, theta), flat, 0.5, GlmLoss::squared()).theta == theta);
  CHECK(explicit_step(at(Algorithm::sgd, theta), s, 0.0, GlmLoss::squared()).theta == theta);
}

TEST_CASE("update_average examples") {
  auto st = at(Algorithm::asgd, vec({5.0}));
  st.theta = vec({0.0});
  st.n = 1;
  st = update_average(st);
  CHECK(st.theta_bar == vec({0.0}));
  st.theta = vec({2.0});
  st.n = 2;
  st = update_average(st);
  CHECK(st.theta_bar == vec({1.0}));

  auto zero = at(Algorithm::asgd, vec({1.0}));
  CHECK_THROWS_AS(update_average(zero), ValidationError);
}

TEST_CASE("averaging matches the batch mean") {
  std::mt19937_64 rng(5);
  auto st = at(Algorithm::asgd, Vector::Zero(4));
  Vector sum = Vector::Zero(4);
  for (int i = 1; i <= 1000; ++i) {
    st.theta = gaussian(rng, 4, 10.0) + Vector::Constant(4, 3.0);
    st.n = static_cast<std::uint64_t>(i);
    st = update_average(st);
    sum += st.theta;
  }
  const Vector batch = sum / 1000.0;
  CHECK((st.theta_bar - batch).norm() <= 1e-12 * batch.norm());
}

TEST_CASE("adagrad examples") {
  const double eta = 0.1;
  // Squared loss gradient at theta = 0 is -2 y x.
  const Sample s{vec({1.0, -0.5, 0.0}), 1.0};
  const auto first = adagrad_step(at(Algorithm::adagrad, Vector::Zero(3)), s, eta, GlmLoss::squared());
  const Vector g = vec({-2.0, 1.0, 0.0});
  for (int i = 0; i < 3; ++i) {
    const double expected =
        g[i] == 0.0 ? 0.0 : -eta * g[i] / (std::abs(g[i]) + kAdagradEpsilon);
    CHECK(first.theta[i] == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK(first.n == 1);

  const Vector theta = vec({1.0, 1.0, 0.0});
  const Sample flat{vec({1.0, 1.0, 3.0}), 2.0};
  const auto same = adagrad_step(at(Algorithm::adagrad, theta), flat, eta, GlmLoss::squared());
  CHECK(same.theta == theta);
  CHECK(same.n == 1);

  // Logistic at a huge negative margin has gradient -y x = -e1 up to 1e-300.
  const Sample unit{vec({1.0}), 1.0};
  auto st = at(Algorithm::adagrad, vec({-1000.0}));
  st = adagrad_step(st, unit, eta, GlmLoss::logistic());
  st = adagrad_step(st, unit, eta, GlmLoss::logistic());
  const double moved = st.theta[0] + 1000.0;
  CHECK(std::abs(moved - eta * (1.0 + 1.0 / std::sqrt(2.0))) <= 1e-7);
}

TEST_CASE("fixed-point residual over random cases") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10000; ++i) {
    const auto c = random_case(rng, i % 2 == 1);
    const auto next = implicit_step(at(Algorithm::isgd, c.theta), c.sample, c.gamma, c.loss);
    const Vector resid =
        next.theta - c.theta + c.gamma * full_gradient(c.loss, c.sample, next.theta);
    CHECK(resid.norm() <= 1e-8);
  }
}

TEST_CASE("bracket property") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 10000; ++i) {
    const auto c = random_case(rng, false);
    const auto r = solve_fixed_point(c.loss, c.sample, c.theta, c.gamma);
    const double end = c.gamma * -c.loss.derivative(r.u0, c.sample.y);
    if (end == 0.0) {
      CHECK(r.u_star == 0.0);
      continue;
    }
    CHECK(r.u_star * end >= 0.0);
    CHECK(std::abs(r.u_star) <= std::abs(end));
    CHECK(r.s_n > 0.0);
    CHECK(r.s_n <= 1.0);
    CHECK(r.s_n == doctest::Approx(r.u_star / end).epsilon(1e-12));
    CHECK(r.residual <= 1e-12 * std::max(1.0, std::abs(end)));
  }
}

TEST_CASE("squared loss closed form") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(1, 50);
  for (int i = 0; i < 1000; ++i) {
    const auto p = dim(rng);
    const Vector x = gaussian(rng, p);
    const double gamma = log_uniform(rng, 1e-4, 10.0);
    const Sample s{x, std::normal_distribution<double>()(rng)};
    const auto r = solve_fixed_point(GlmLoss::squared(), s, gaussian(rng, p), gamma);
    CHECK(std::abs(r.s_n - 1.0 / (1.0 + 2.0 * gamma * x.squaredNorm())) <= 1e-10);
  }
}

TEST_CASE("implicit step matches damped Newton on the proximal objective") {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_case(rng, i % 3 == 0);
    const auto next = implicit_step(at(Algorithm::isgd, c.theta), c.sample, c.gamma, c.loss);
    const Vector oracle =
        testing::prox_newton(c.loss, c.sample.x.to_dense(), c.sample.y, c.theta, c.gamma);
    CHECK((next.theta - oracle).norm() <= 1e-8 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("proximal optimality") {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_case(rng, i % 2 == 0);
    const auto imp = implicit_step(at(Algorithm::isgd, c.theta), c.sample, c.gamma, c.loss);
    const auto exp = explicit_step(at(Algorithm::sgd, c.theta), c.sample, c.gamma, c.loss);
    const double at_new = proximal_objective(c.loss, c.sample, c.theta, imp.theta, c.gamma);
    const double slack = 1e-12 * (1.0 + std::abs(at_new));
    CHECK(at_new <= proximal_objective(c.loss, c.sample, c.theta, c.theta, c.gamma) + slack);
    if (!is_diverged(exp.theta)) {
      CHECK(at_new <= proximal_objective(c.loss, c.sample, c.theta, exp.theta, c.gamma) + slack);
    }
  }
}

TEST_CASE("contraction on noiseless one-dimensional data") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> normal;
  const double theta_star = 1.7;
  const auto schedule = LearningRate::polynomial(1.0, 2.0 / 3.0);
  auto st = at(Algorithm::isgd, vec({-3.0}));
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    const double x = normal(rng);
    const double gamma = schedule.rate(n);
    const double before = std::pow(st.theta[0] - theta_star, 2);
    st = implicit_step(st, Sample{vec({x}), x * theta_star}, gamma, GlmLoss::squared());
    const double after = std::pow(st.theta[0] - theta_star, 2);
    CHECK(after <= before / (1.0 + gamma * 2.0 * x * x) + 1e-12);
  }
}

TEST_CASE("logistic step bound") {
  std::mt19937_64 rng(27);
  const std::size_t p = 10;
  const Vector theta_star = gaussian(rng, p, 2.0);
  std::bernoulli_distribution coin;
  const auto schedule = LearningRate::polynomial(5.0, 0.6);
  auto st = at(Algorithm::aisgd, Vector::Zero(p));
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    const Vector x = gaussian(rng, p);
    const double y = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-x.dot(theta_star))))(rng)
                         ? 1.0 : -1.0;
    const double gamma = schedule.rate(n);
    const Vector before = st.theta;
    st = step(st, Sample{x, y}, gamma, GlmLoss::logistic());
    CHECK((st.theta - before).norm() <= 2.0 * gamma * x.norm() + 1e-12);
  }
}

TEST_CASE("small-rate gap shrinks quadratically") {
  std::mt19937_64 rng(28);
  for (int i = 0; i < 100; ++i) {
    auto c = random_case(rng, false);
    c.gamma = log_uniform(rng, 1e-4, 1e-3);
    auto gap = [&](double gamma) {
      const auto imp = implicit_step(at(Algorithm::isgd, c.theta), c.sample, gamma, c.loss);
      const auto exp = explicit_step(at(Algorithm::sgd, c.theta), c.sample, gamma, c.loss);
      return (imp.theta - exp.theta).norm();
    };
    const double g1 = gap(c.gamma), g2 = gap(c.gamma / 2.0);
    if (g1 < 1e-13) continue;  // gradient or curvature vanish here
    // The ratio tends to 4 from below as gamma -> 0.
    CHECK(g1 / g2 >= 4.0 * (1.0 - 1e-2));
  }
}

TEST_CASE("state bookkeeping") {
  const auto st = OptimizerState::start(Algorithm::aisgd, vec({1.0, 2.0}));
  CHECK(st.n == 0);
  CHECK(st.theta_bar == st.theta);
  CHECK(st.estimate() == st.theta);
  CHECK(OptimizerState::start(Algorithm::adagrad, vec({1.0})).adagrad_g.has_value());

  std::mt19937_64 rng(29);
  for (auto a : {Algorithm::sgd, Algorithm::isgd, Algorithm::asgd, Algorithm::aisgd,
                 Algorithm::adagrad}) {
    auto s = OptimizerState::start(a, Vector::Zero(3));
    Vector sum = Vector::Zero(3);
    for (std::uint64_t n = 1; n <= 50; ++n) {
      s = step(s, Sample{gaussian(rng, 3), 1.0}, 0.05, GlmLoss::squared());
      CHECK(s.n == n);
      sum += s.theta;
    }
    if (is_averaged(a)) {
      CHECK((s.estimate() - sum / 50.0).norm() <= 1e-12 * (1.0 + sum.norm()));
    } else {
      CHECK(s.estimate() == s.theta);
    }
  }
}

TEST_CASE("algorithm names") {
  for (auto a : {Algorithm::sgd, Algorithm::isgd, Algorithm::asgd, Algorithm::aisgd,
                 Algorithm::adagrad}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK_THROWS_WITH_AS(parse_algorithm("svrg"), doctest::Contains("aisgd"), ValidationError);
}

TEST_CASE("divergence detection") {
  CHECK_FALSE(is_diverged(vec({1.0, 2.0})));
  CHECK(is_diverged(vec({1e13})));
  CHECK(is_diverged(vec({std::nan("")})));
}
