// Copyright 2026 The facerank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Covariance statistics and symmetric-PSD primitives shared by every metric.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace facerank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CovMode { diagonal, full };

const char* to_string(CovMode mode);
CovMode parse_cov_mode(const std::string& text);

inline constexpr double kSymmetryTol = 1e-8;
inline constexpr double kPinvRelTol = 1e-10;
inline constexpr double kLogDetFloor = 1e-12;

// Embeddings of one model on one target dataset.
//
// `labels` are dense in [0, k_count). `label_values[k]` is the original
// label id that was remapped to k (identity for generated data).
struct FeatureSet {
  std::string model_id;
  Matrix features;  // n x d
  std::vector<std::int32_t> labels;
  int k_count = 0;
  std::vector<std::int64_t> label_values;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }
};

// Throws Error{data|missing_class|shape} if an invariant is violated.
void validate(const FeatureSet& fs);

struct ClassStats {
  CovMode mode = CovMode::diagonal;
  Vector global_mean;               // d
  Matrix class_means;               // K x d
  Matrix sigma_w;                   // d x d
  Matrix sigma_b;                   // d x d
  Matrix class_var;                 // K x d, diagonal of each class covariance
  std::vector<Matrix> class_cov;    // K full d x d matrices, full mode only
  std::vector<Eigen::Index> class_counts;

  int k_count() const { return static_cast<int>(class_means.rows()); }
  Eigen::Index dim() const { return class_means.cols(); }
};

// Population (1/n_k) moments. Sigma_W and Sigma_B are always full; the
// per-class covariances are kept full only in CovMode::full.
ClassStats class_statistics(const FeatureSet& fs, CovMode mode = CovMode::diagonal);

// Throws Error{shape} unless `m` is square and symmetric within kSymmetryTol.
void check_symmetric(const Matrix& m);

// Moore-Penrose inverse of a symmetric PSD matrix via eigendecomposition.
// Eigenvalues at or below rel_tol * max eigenvalue are treated as zero.
Matrix pinv_psd(const Matrix& m, double rel_tol = kPinvRelTol);

// Sum of log(max(lambda_i, floor)) over the eigenvalues of `m`.
double log_det_psd(const Matrix& m, double floor = kLogDetFloor);
// Diagonal variant: `diag` holds the diagonal of a diagonal matrix.
double log_det_psd(const Vector& diag, double floor = kLogDetFloor);

// trace(a * b) without forming the product.
inline double trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace facerank
