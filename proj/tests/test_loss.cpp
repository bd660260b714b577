#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aisgd/core.hpp"
#include "aisgd/loss.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace aisgd;

namespace {

const GlmLoss kFamilies[] = {GlmLoss::squared(), GlmLoss::logistic(), GlmLoss::poisson(),
                             GlmLoss::smoothed_hinge(0.5), GlmLoss::smoothed_hinge(0.1)};

}  // namespace

TEST_CASE("loss_value examples") {
  CHECK(loss_value(GlmLoss::squared(), 1.0, 1.0) == 0.0);
  CHECK(loss_value(GlmLoss::logistic(), 0.0, 1.0) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(loss_value(GlmLoss::poisson(), 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(loss_value(GlmLoss::squared(), 0.5, 1.0) > 0.0);
}

TEST_CASE("link_derivative examples") {
  CHECK(link_derivative(GlmLoss::squared(), 0.7, 0.7) == 0.0);
  CHECK(link_derivative(GlmLoss::squared(), 0.0, 1.0) == -2.0);
  CHECK(link_derivative(GlmLoss::logistic(), 0.0, 1.0) == doctest::Approx(-0.5));
}

TEST_CASE("second_derivative examples") {
  CHECK(second_derivative(GlmLoss::squared(), -3.0, 8.0) == 2.0);
  CHECK(second_derivative(GlmLoss::logistic(), 0.0, -1.0) == doctest::Approx(0.25));
  CHECK(second_derivative(GlmLoss::smoothed_hinge(0.5), 2.0, 1.0) == 0.0);
  CHECK(second_derivative(GlmLoss::smoothed_hinge(0.5), -2.0, -1.0) == 0.0);
}

TEST_CASE("smoothed hinge pieces") {
  const auto h = GlmLoss::smoothed_hinge(0.5);
  CHECK(h.value(1.5, 1.0) == 0.0);
  CHECK(h.value(0.75, 1.0) == doctest::Approx(0.0625));  // (0.25)^2 / 1
  CHECK(h.value(-1.0, 1.0) == doctest::Approx(1.75));    // 1 + 1 - 0.25
  CHECK(h.value(0.5, 1.0) == doctest::Approx(0.25));     // continuous at 1 - delta
  CHECK(h.derivative(-1.0, -1.0) == 0.0);
  CHECK(h.derivative(1.0, -1.0) == 1.0);
}

TEST_CASE("derivatives match central finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> uu(-4.0, 4.0);
  const double h = 1e-6;
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& loss = kFamilies[pick(rng)];
    const double y = testing::random_label(rng, loss.family);
    const double u = uu(rng);
    if (loss.family == LossFamily::smoothed_hinge) {
      // Skip points within h of a kink of l'.
      const double m = y * u;
      if (std::abs(m - 1.0) < 2 * h || std::abs(m - (1.0 - loss.delta)) < 2 * h) continue;
    }
    const double fd = (loss.value(u + h, y) - loss.value(u - h, y)) / (2.0 * h);
    const double d = loss.derivative(u, y);
    CHECK(std::abs(d - fd) <= 1e-6 * (1.0 + std::abs(d)));
    const double fd2 = (loss.derivative(u + h, y) - loss.derivative(u - h, y)) / (2.0 * h);
    if (loss.family != LossFamily::smoothed_hinge) {
      CHECK(std::abs(loss.second_derivative(u, y) - fd2) <= 1e-5 * (1.0 + std::abs(fd2)));
    }
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("convexity and bounded derivatives") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> uu(-30.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    const auto& loss = kFamilies[pick(rng)];
    const double y = testing::random_label(rng, loss.family);
    const double u = loss.family == LossFamily::poisson ? uu(rng) / 3.0 : uu(rng);
    CHECK(loss.second_derivative(u, y) >= 0.0);
    CHECK(std::isfinite(loss.value(u, y)));
    if (auto bound = loss.derivative_bound()) {
      CHECK(std::abs(loss.derivative(u, y)) <= *bound);
    }
  }
  CHECK(GlmLoss::logistic().derivative_bound() == 1.0);
  CHECK(GlmLoss::smoothed_hinge().derivative_bound() == 1.0);
  CHECK_FALSE(GlmLoss::squared().derivative_bound().has_value());
  CHECK_FALSE(GlmLoss::poisson().derivative_bound().has_value());
}

TEST_CASE("logistic is stable for large margins") {
  const auto l = GlmLoss::logistic();
  CHECK(l.value(800.0, 1.0) == 0.0);
  CHECK(l.value(-800.0, 1.0) == doctest::Approx(800.0));
  CHECK(l.derivative(-800.0, 1.0) == doctest::Approx(-1.0));
  CHECK(l.second_derivative(800.0, 1.0) >= 0.0);
}

TEST_CASE("input validation") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(GlmLoss::squared().value(inf, 1.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::squared().derivative(std::nan(""), 1.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::logistic().value(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::smoothed_hinge().derivative(0.0, 2.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::poisson().value(0.0, -1.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::poisson().value(0.0, 1.5), ValidationError);
  CHECK_THROWS_AS(GlmLoss::smoothed_hinge(0.0), ValidationError);
  CHECK_THROWS_AS(GlmLoss::squared().with_lambda(-1.0), ValidationError);
}

TEST_CASE("parse by name") {
  CHECK(GlmLoss::parse("squared").family == LossFamily::squared);
  CHECK(GlmLoss::parse("logistic", 1e-3).lambda == 1e-3);
  CHECK(GlmLoss::parse("poisson").family == LossFamily::poisson);
  const auto h = GlmLoss::parse("hinge:0.25");
  CHECK(h.family == LossFamily::smoothed_hinge);
  CHECK(h.delta == 0.25);
  CHECK(GlmLoss::parse("hinge").delta == 0.5);
  CHECK(GlmLoss::parse(h.name()).delta == 0.25);
  CHECK_THROWS_AS(GlmLoss::parse("huber"), ValidationError);
  CHECK_THROWS_AS(GlmLoss::parse("hinge:x"), ValidationError);
}
