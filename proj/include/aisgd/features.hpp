#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace aisgd {

using Vector = Eigen::VectorXd;

/// Sparse vector as parallel arrays of strictly increasing 0-based
/// indices and their values.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  bool operator==(const SparseVector&) const = default;
};

/// A feature vector stored either densely or sparsely. All operations the
/// solvers need (dot, axpy, squared norm, nonzero traversal) work on both.
class FeatureVector {
 public:
  FeatureVector() : data_(Vector()) {}
  FeatureVector(Vector dense);  // NOLINT(google-explicit-constructor)
  FeatureVector(SparseVector sparse);  // NOLINT(google-explicit-constructor)

  std::size_t dim() const;
  bool is_sparse() const { return std::holds_alternative<SparseVector>(data_); }

  const Vector& dense() const { return std::get<Vector>(data_); }
  const SparseVector& sparse() const { return std::get<SparseVector>(data_); }

  double dot(const Vector& theta) const;
  /// y <- y + a * x
  void axpy(double a, Vector& y) const;
  double squared_norm() const;
  bool all_finite() const;
  Vector to_dense() const;

  /// Calls f(index, value) for each stored entry.
  template <typename F>
  void for_each_nonzero(F&& f) const {
    if (const auto* s = std::get_if<SparseVector>(&data_)) {
      for (std::size_t k = 0; k < s->nnz(); ++k) f(std::size_t{s->index[k]}, s->value[k]);
    } else {
      const auto& d = std::get<Vector>(data_);
      for (Eigen::Index i = 0; i < d.size(); ++i) f(static_cast<std::size_t>(i), d[i]);
    }
  }

 private:
  std::variant<Vector, SparseVector> data_;
};

/// One observation (x, y).
struct Sample {
  FeatureVector x;
  double y = 0.0;
};

}  // namespace aisgd
