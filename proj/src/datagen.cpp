#include "aisgd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace aisgd {

namespace {

// Stream ids under a spec's seed; the design stream id is added to kDesign.
constexpr std::uint64_t kBasis = 0x5eed0001;
constexpr std::uint64_t kDesign = 0x5eed1000;

}  // namespace

Eigen::MatrixXd Covariance::matrix() const {
  return basis * eigenvalues.asDiagonal() * basis.transpose();
}

Vector harmonic_spectrum(std::size_t p) {
  Vector ev(static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p; ++k) ev[static_cast<Eigen::Index>(k)] = 1.0 / static_cast<double>(k + 1);
  return ev;
}

Covariance random_covariance(const Vector& eigenvalues, RngSeed seed) {
  const Eigen::Index p = eigenvalues.size();
  if (p == 0) throw ValidationError("covariance dimension must be at least 1");
  if ((eigenvalues.array() <= 0.0).any()) throw ValidationError("eigenvalues must be positive");

  Rng rng = make_rng(seed, kBasis);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd gauss(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) gauss(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return {std::move(q), eigenvalues};
}

Covariance diagonal_covariance(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) throw ValidationError("covariance dimension must be at least 1");
  if ((eigenvalues.array() <= 0.0).any()) throw ValidationError("eigenvalues must be positive");
  return {Eigen::MatrixXd::Identity(eigenvalues.size(), eigenvalues.size()), eigenvalues};
}

SyntheticSpec SyntheticSpec::normal_preset(std::size_t n, std::size_t p, RngSeed seed) {
  if (p == 0) throw ValidationError("dimension p must be at least 1");
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.theta_star = Vector::Zero(static_cast<Eigen::Index>(p));
  spec.covariance = random_covariance(harmonic_spectrum(p), seed);
  spec.noise_sd = 1.0;
  spec.seed = seed;
  spec.task = SyntheticTask::linear;
  return spec;
}

Dataset make_normal_design(const SyntheticSpec& spec, std::uint64_t stream) {
  if (spec.p == 0) throw ValidationError("dimension p must be at least 1");
  if (spec.n == 0) throw ValidationError("sample count n must be at least 1");
  if (!(spec.noise_sd > 0.0) || !std::isfinite(spec.noise_sd)) {
    throw ValidationError("noise_sd must be positive");
  }
  const auto p = static_cast<Eigen::Index>(spec.p);
  if (spec.covariance.eigenvalues.size() != p || spec.theta_star.size() != p) {
    throw ValidationError("synthetic spec dimensions are inconsistent");
  }

  const Eigen::MatrixXd factor =
      spec.covariance.basis * spec.covariance.eigenvalues.cwiseSqrt().asDiagonal();
  Rng rng = make_rng(spec.seed, kDesign + stream);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  Dataset data;
  data.p = spec.p;
  data.storage = Storage::dense;
  data.spec = spec;
  data.samples.reserve(spec.n);
  Vector z(p);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z[k] = normal(rng);
    Vector x = factor * z;
    const double u = x.dot(spec.theta_star);
    double y;
    if (spec.task == SyntheticTask::linear) {
      y = u + spec.noise_sd * normal(rng);
    } else {
      const double prob = 1.0 / (1.0 + std::exp(-u));
      y = uniform(rng) < prob ? 1.0 : -1.0;
    }
    data.samples.push_back({FeatureVector(std::move(x)), y});
  }
  return data;
}

double excess_risk(const Vector& theta, const SyntheticSpec& spec) {
  if (theta.size() != spec.theta_star.size()) {
    throw ValidationError("excess_risk: parameter has dimension " + std::to_string(theta.size()) +
                          ", expected " + std::to_string(spec.theta_star.size()));
  }
  const Vector w = spec.covariance.basis.transpose() * (theta - spec.theta_star);
  return (w.array().square() * spec.covariance.eigenvalues.array()).sum();
}

double trace_radius(const SyntheticSpec& spec) { return spec.covariance.eigenvalues.sum(); }

double mean_squared_norm(std::span<const Sample> samples) {
  if (samples.empty()) throw ValidationError("mean_squared_norm of an empty dataset");
  double acc = 0.0;
  for (const auto& s : samples) acc += s.x.squared_norm();
  return acc / static_cast<double>(samples.size());
}

Dataset shuffled(const Dataset& data, RngSeed seed) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0x5fff1e);
  std::shuffle(order.begin(), order.end(), rng);
  Dataset out;
  out.p = data.p;
  out.storage = data.storage;
  out.spec = data.spec;
  out.samples.reserve(data.size());
  for (auto i : order) out.samples.push_back(data.samples[i]);
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, RngSeed seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  Dataset mixed = shuffled(data, seed);
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(mixed.size())));
  if (n_test == 0 || n_test >= mixed.size()) {
    throw ValidationError("test split leaves an empty train or test set");
  }
  Dataset train, test;
  train.p = test.p = data.p;
  train.storage = test.storage = data.storage;
  const auto cut = mixed.samples.begin() + static_cast<std::ptrdiff_t>(mixed.size() - n_test);
  train.samples.assign(std::make_move_iterator(mixed.samples.begin()), std::make_move_iterator(cut));
  test.samples.assign(std::make_move_iterator(cut), std::make_move_iterator(mixed.samples.end()));
  return {std::move(train), std::move(test)};
}

}  // namespace aisgd
