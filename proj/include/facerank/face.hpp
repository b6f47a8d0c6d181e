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

// Fair Collapse: variance collapse, class fairness, and zoo-level fusion.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "facerank/linalg.hpp"

namespace facerank {

struct NumericConfig {
  double pinv_rel_tol = kPinvRelTol;
  double logdet_floor = kLogDetFloor;
};

// Shrinkage added to each full class covariance before the Bhattacharyya
// terms: lambda = kFullShrinkage * trace(Sigma_k) / d.
inline constexpr double kFullShrinkage = 1e-4;

// Sigma_B is flagged degenerate when trace(Sigma_B) < this * trace(Sigma_W).
inline constexpr double kCollapsedMeansRatio = 1e-12;

struct VarianceCollapse {
  double score = 0.0;               // C, always <= 0
  bool means_collapsed = false;     // Sigma_B ~ 0 makes C trivially 0
};

// C = -(1/K) trace(Sigma_W pinv(Sigma_B)).
VarianceCollapse variance_collapse(const ClassStats& stats, const NumericConfig& num = {});

// Pairwise Bhattacharyya distances D (nats) and coefficients B = exp(-D).
struct OverlapMatrix {
  Matrix distances;
  Matrix coefficients;

  int k_count() const { return static_cast<int>(distances.rows()); }
};

// Gaussian class model N(class mean, Sigma_k). In diagonal mode only the
// per-dimension variances are used; full mode requires stats computed with
// CovMode::full and applies kFullShrinkage.
OverlapMatrix overlap_matrix(const ClassStats& stats, CovMode mode,
                             const NumericConfig& num = {});

// Bhattacharyya distance between two Gaussians with diagonal covariances.
double bhattacharyya_diagonal(const Vector& mean_a, const Vector& var_a, const Vector& mean_b,
                              const Vector& var_b, double floor = kLogDetFloor);

struct FairnessConfig {
  double temperature = 0.05;
  // The softmax runs over every column of a row, including the class's own
  // coefficient B(k, k) = 1. Setting this drops the self term.
  bool exclude_self = false;
};

// F = -(1/K) sum_i sum_j P_ij log P_ij, P_i. = softmax(B_i. / t).
double class_fairness(const OverlapMatrix& om, const FairnessConfig& cfg = {});

// Raw per-model terms going into the zoo-level min-max fusion.
struct RawScore {
  std::string model_id;
  std::optional<double> c;
  std::optional<double> f;
};

struct ScoreReport {
  std::string model_id;
  std::optional<double> raw_c;
  std::optional<double> raw_f;
  std::optional<double> norm_c;
  std::optional<double> norm_f;
  std::optional<double> face;
  std::map<std::string, double> baselines;
  std::vector<std::string> flags;
  std::optional<std::string> error;  // set when the entry could not be scored
};

// Min-max normalises C and F across the zoo and sums them. A term whose
// max equals its min normalises to 0.5 for every model. `face` is present
// only when both terms are.
std::vector<ScoreReport> fuse_scores(const std::vector<RawScore>& raw);

// Distance of the globally centred class-mean Gram matrix to a simplex ETF.
double etf_distance(const Matrix& class_means, const Vector& global_mean);

}  // namespace facerank
