#include "aisgd/schedule.hpp"

#include "aisgd/config.hpp"
#include "aisgd/core.hpp"
#include "aisgd/experiment.hpp"

#include <cmath>
#include <string>

namespace aisgd {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be a positive finite number");
  }
}

}  // namespace

LearningRate LearningRate::constant(double gamma) {
  require_positive(gamma, "constant learning rate");
  return {Kind::constant, gamma, 0.0};
}

LearningRate LearningRate::polynomial(double gamma1, double exponent) {
  require_positive(gamma1, "gamma1");
  if (!(exponent > 0.5 && exponent <= 1.0)) {
    throw ValidationError("polynomial exponent must lie in (0.5, 1], got " + format_real(exponent));
  }
  return {Kind::polynomial, gamma1, exponent};
}

LearningRate LearningRate::xu(double eta0) {
  require_positive(eta0, "eta0");
  return {Kind::xu, eta0, 0.75};
}

LearningRate LearningRate::parse(std::string_view text) {
  auto next = [&text]() {
    auto colon = text.find(':');
    auto head = text.substr(0, colon);
    text = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    return head;
  };
  const std::string original(text);
  const auto kind = next();
  if (kind == "const" || kind == "constant") {
    auto g = parse_double(next(), "constant rate");
    if (!text.empty()) throw ValidationError("trailing fields in rate '" + original + "'");
    return constant(g);
  }
  if (kind == "poly" || kind == "polynomial") {
    auto g1 = parse_double(next(), "gamma1");
    auto e = parse_double(next(), "exponent");
    if (!text.empty()) throw ValidationError("trailing fields in rate '" + original + "'");
    return polynomial(g1, e);
  }
  if (kind == "xu") {
    auto eta0 = parse_double(next(), "eta0");
    if (!text.empty()) throw ValidationError("trailing fields in rate '" + original + "'");
    return xu(eta0);
  }
  throw ValidationError("unknown rate '" + original +
                        "' (expected const:<g>, poly:<g1>:<exponent> or xu:<eta0>)");
}

double LearningRate::rate(std::uint64_t n) const {
  if (n == 0) throw ValidationError("learning-rate iterations are 1-indexed; got n = 0");
  const double dn = static_cast<double>(n);
  switch (kind_) {
    case Kind::constant:
      return scale_;
    case Kind::polynomial:
      return scale_ * std::pow(dn, -exponent_);
    case Kind::xu:
      return scale_ * std::pow(1.0 + scale_ * dn, -0.75);
  }
  return scale_;
}

LearningRate LearningRate::scaled(double factor) const {
  switch (kind_) {
    case Kind::constant:
      return constant(scale_ * factor);
    case Kind::polynomial:
      return polynomial(scale_ * factor, exponent_);
    case Kind::xu:
      return xu(scale_ * factor);
  }
  return *this;
}

std::string LearningRate::label() const {
  switch (kind_) {
    case Kind::constant:
      return "const:" + format_real(scale_);
    case Kind::polynomial:
      return "poly:" + format_real(scale_) + ":" + format_real(exponent_);
    case Kind::xu:
      return "xu:" + format_real(scale_);
  }
  return {};
}

}  // namespace aisgd
