#pragma once

#include "aisgd/core.hpp"
#include "aisgd/features.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace aisgd {

/// H = basis * diag(eigenvalues) * basis^T with an orthogonal basis.
struct Covariance {
  Eigen::MatrixXd basis;
  Vector eigenvalues;

  Eigen::MatrixXd matrix() const;
  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// {1, 1/2, ..., 1/p}
Vector harmonic_spectrum(std::size_t p);

/// Haar-random orthogonal basis (QR of a Gaussian matrix, R's diagonal made
/// positive) carrying the given eigenvalues.
Covariance random_covariance(const Vector& eigenvalues, RngSeed seed);

/// Identity basis; H = diag(eigenvalues).
Covariance diagonal_covariance(const Vector& eigenvalues);

enum class SyntheticTask { linear, logistic };

struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t p = 0;
  Vector theta_star;
  Covariance covariance;
  double noise_sd = 1.0;
  RngSeed seed;
  SyntheticTask task = SyntheticTask::linear;

  /// p-dimensional normal design with eigenvalues 1/k, theta_star = 0,
  /// unit noise, linear outcomes.
  static SyntheticSpec normal_preset(std::size_t n, std::size_t p, RngSeed seed);
};

enum class Storage { dense, sparse };

struct Dataset {
  std::vector<Sample> samples;
  std::size_t p = 0;
  Storage storage = Storage::dense;
  std::optional<SyntheticSpec> spec;

  std::size_t size() const { return samples.size(); }
};

/// x = Q diag(sqrt(eigenvalues)) z with z standard normal; linear task
/// y = x^T theta_star + noise_sd * eps, logistic task y = +-1 with
/// P(+1) = sigmoid(x^T theta_star). `stream` selects an independent
/// draw (training vs. test) from the same spec.
Dataset make_normal_design(const SyntheticSpec& spec, std::uint64_t stream = 0);

/// (theta - theta_star)^T H (theta - theta_star)
double excess_risk(const Vector& theta, const SyntheticSpec& spec);

/// R^2 = trace(H)
double trace_radius(const SyntheticSpec& spec);

/// Mean squared feature norm, the empirical counterpart of trace(H).
double mean_squared_norm(std::span<const Sample> samples);

/// Copy with samples in a seeded random order.
Dataset shuffled(const Dataset& data, RngSeed seed);

/// Seeded split into (train, test) with round(test_fraction * size) test samples.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, RngSeed seed);

}  // namespace aisgd
