#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aisgd {

/// Step-size sequence n -> gamma_n over 1-indexed iterations.
///
///   constant:    gamma
///   polynomial:  gamma1 * n^(-exponent), exponent in (0.5, 1]
///   xu:          eta0 * (1 + eta0 * n)^(-3/4)
class LearningRate {
 public:
  enum class Kind { constant, polynomial, xu };

  static LearningRate constant(double gamma);
  static LearningRate polynomial(double gamma1, double exponent);
  static LearningRate xu(double eta0);

  /// Parses "const:<g>", "poly:<g1>:<exponent>" or "xu:<eta0>".
  static LearningRate parse(std::string_view text);

  double rate(std::uint64_t n) const;

  Kind kind() const { return kind_; }
  /// gamma for constant, gamma1 for polynomial, eta0 for xu.
  double scale() const { return scale_; }
  double exponent() const { return exponent_; }

  /// Same schedule with the leading constant multiplied by `factor`.
  LearningRate scaled(double factor) const;

  /// Round-trippable through parse().
  std::string label() const;

 private:
  LearningRate(Kind kind, double scale, double exponent)
      : kind_(kind), scale_(scale), exponent_(exponent) {}

  Kind kind_;
  double scale_;
  double exponent_;
};

/// rate_at(schedule, n); rejects n == 0.
inline double rate_at(const LearningRate& schedule, std::uint64_t n) {
  return schedule.rate(n);
}

}  // namespace aisgd
