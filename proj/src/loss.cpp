#include "aisgd/loss.hpp"

#include "aisgd/core.hpp"
#include "aisgd/experiment.hpp"

#include <cmath>
#include <string>

namespace aisgd {

namespace {

// 1 / (1 + exp(-t)) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t))
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

void check_inputs(const GlmLoss& loss, double u, double y) {
  if (!std::isfinite(u) || !std::isfinite(y)) {
    throw ValidationError("loss evaluated at non-finite input");
  }
  if (!loss.label_valid(y)) {
    throw ValidationError("label " + format_real(y) + " is invalid for " + loss.name() + " loss");
  }
}

}  // namespace

GlmLoss GlmLoss::smoothed_hinge(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("hinge smoothing width must be positive");
  }
  return {LossFamily::smoothed_hinge, delta};
}

GlmLoss GlmLoss::parse(std::string_view name, double lambda) {
  GlmLoss out;
  if (name == "squared") {
    out = squared();
  } else if (name == "logistic") {
    out = logistic();
  } else if (name == "poisson") {
    out = poisson();
  } else if (name == "hinge") {
    out = smoothed_hinge();
  } else if (name.starts_with("hinge:")) {
    out = smoothed_hinge(parse_double(name.substr(6), "hinge delta"));
  } else {
    throw ValidationError("unknown loss '" + std::string(name) +
                          "' (expected squared, logistic, poisson or hinge:<delta>)");
  }
  return out.with_lambda(lambda);
}

std::string GlmLoss::name() const {
  switch (family) {
    case LossFamily::squared:
      return "squared";
    case LossFamily::logistic:
      return "logistic";
    case LossFamily::poisson:
      return "poisson";
    case LossFamily::smoothed_hinge:
      return "hinge:" + format_real(delta);
  }
  return {};
}

GlmLoss GlmLoss::with_lambda(double l) const {
  if (!(l >= 0.0) || !std::isfinite(l)) {
    throw ValidationError("regularization lambda must be non-negative");
  }
  GlmLoss out = *this;
  out.lambda = l;
  return out;
}

bool GlmLoss::label_valid(double y) const {
  switch (family) {
    case LossFamily::squared:
      return std::isfinite(y);
    case LossFamily::logistic:
    case LossFamily::smoothed_hinge:
      return y == 1.0 || y == -1.0;
    case LossFamily::poisson:
      return y >= 0.0 && std::isfinite(y) && y == std::floor(y);
  }
  return false;
}

double GlmLoss::value(double u, double y) const {
  check_inputs(*this, u, y);
  switch (family) {
    case LossFamily::squared: {
      const double r = y - u;
      return r * r;
    }
    case LossFamily::logistic:
      return softplus(-y * u);
    case LossFamily::poisson:
      return std::exp(u) - y * u;
    case LossFamily::smoothed_hinge: {
      const double m = y * u;
      if (m >= 1.0) return 0.0;
      if (m <= 1.0 - delta) return 1.0 - m - 0.5 * delta;
      return (1.0 - m) * (1.0 - m) / (2.0 * delta);
    }
  }
  return 0.0;
}

double GlmLoss::derivative(double u, double y) const {
  check_inputs(*this, u, y);
  switch (family) {
    case LossFamily::squared:
      return -2.0 * (y - u);
    case LossFamily::logistic:
      return -y * sigmoid(-y * u);
    case LossFamily::poisson:
      return std::exp(u) - y;
    case LossFamily::smoothed_hinge: {
      const double m = y * u;
      if (m >= 1.0) return 0.0;
      if (m <= 1.0 - delta) return -y;
      return -y * (1.0 - m) / delta;
    }
  }
  return 0.0;
}

double GlmLoss::second_derivative(double u, double y) const {
  check_inputs(*this, u, y);
  switch (family) {
    case LossFamily::squared:
      return 2.0;
    case LossFamily::logistic: {
      const double m = y * u;
      return sigmoid(m) * sigmoid(-m);
    }
    case LossFamily::poisson:
      return std::exp(u);
    case LossFamily::smoothed_hinge: {
      const double m = y * u;
      if (m >= 1.0 || m <= 1.0 - delta) return 0.0;
      return 1.0 / delta;
    }
  }
  return 0.0;
}

std::optional<double> GlmLoss::derivative_bound() const {
  switch (family) {
    case LossFamily::logistic:
    case LossFamily::smoothed_hinge:
      return 1.0;
    case LossFamily::squared:
    case LossFamily::poisson:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace aisgd
