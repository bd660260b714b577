#include "aisgd/features.hpp"

#include "aisgd/core.hpp"

#include <cmath>
#include <string>

namespace aisgd {

FeatureVector::FeatureVector(Vector dense) : data_(std::move(dense)) {}

FeatureVector::FeatureVector(SparseVector sparse) {
  if (sparse.index.size() != sparse.value.size()) {
    throw ValidationError("sparse vector index/value length mismatch");
  }
  for (std::size_t k = 0; k < sparse.nnz(); ++k) {
    if (sparse.index[k] >= sparse.dim) {
      throw ValidationError("sparse index " + std::to_string(sparse.index[k]) +
                            " out of range for dimension " + std::to_string(sparse.dim));
    }
    if (k > 0 && sparse.index[k] <= sparse.index[k - 1]) {
      throw ValidationError("sparse indices must be strictly increasing");
    }
  }
  data_ = std::move(sparse);
}

std::size_t FeatureVector::dim() const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) return s->dim;
  return static_cast<std::size_t>(std::get<Vector>(data_).size());
}

double FeatureVector::dot(const Vector& theta) const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s->nnz(); ++k) acc += s->value[k] * theta[s->index[k]];
    return acc;
  }
  return std::get<Vector>(data_).dot(theta);
}

void FeatureVector::axpy(double a, Vector& y) const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) {
    for (std::size_t k = 0; k < s->nnz(); ++k) y[s->index[k]] += a * s->value[k];
    return;
  }
  y.noalias() += a * std::get<Vector>(data_);
}

double FeatureVector::squared_norm() const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) {
    double acc = 0.0;
    for (double v : s->value) acc += v * v;
    return acc;
  }
  return std::get<Vector>(data_).squaredNorm();
}

bool FeatureVector::all_finite() const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) {
    for (double v : s->value) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
  return std::get<Vector>(data_).allFinite();
}

Vector FeatureVector::to_dense() const {
  if (const auto* s = std::get_if<SparseVector>(&data_)) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(s->dim));
    for (std::size_t k = 0; k < s->nnz(); ++k) out[s->index[k]] = s->value[k];
    return out;
  }
  return std::get<Vector>(data_);
}

}  // namespace aisgd
