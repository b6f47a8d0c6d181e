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

// Comparison metrics: LEEP, NCE, LogME, H-score and GBC.

#include <cstdint>
#include <span>
#include <vector>

#include "facerank/face.hpp"
#include "facerank/linalg.hpp"

namespace facerank {

inline constexpr double kProbFloor = 1e-12;

// Source-classifier outputs theta(x_i), one row-stochastic row per sample.
struct SourcePredictions {
  Matrix probs;  // n x Z

  Eigen::Index n() const { return probs.rows(); }
  Eigen::Index source_class_count() const { return probs.cols(); }
};

// Throws Error{range|shape|data} unless every row lies in [0, 1] and sums to
// 1 within `row_sum_tol`, with Z >= 2.
void validate(const SourcePredictions& preds, double row_sum_tol = 1e-6);

// Row-wise argmax; ties go to the lowest class index.
std::vector<std::int32_t> hard_labels(const SourcePredictions& preds);

// Log expected empirical prediction. Always <= 0.
double leep(const SourcePredictions& preds, std::span<const std::int32_t> labels);

// Negative conditional entropy -H(Y | Z) of the empirical joint.
double nce(std::span<const std::int32_t> source_labels, std::span<const std::int32_t> labels);

inline constexpr int kLogMeMaxIterations = 100;
inline constexpr double kLogMeTol = 1e-5;      // on per-sample evidence
inline constexpr double kLogMeEpsilon = 1e-5;  // regulariser in the updates

struct LogMeResult {
  double value = 0.0;  // mean over one-hot columns of log evidence / n
  bool converged = true;
  int max_iterations_used = 0;
};

// Bayesian linear regression evidence for each one-hot label column, with
// MacKay fixed-point updates of (alpha, beta) starting at (1, 1).
LogMeResult logme(const FeatureSet& fs);

// trace(pinv(cov(F)) cov_between(F)) with population covariances.
double hscore(const FeatureSet& fs, double rel_tol = kPinvRelTol);

// Negative sum of Bhattacharyya coefficients over unordered class pairs.
double gbc(const OverlapMatrix& om);

}  // namespace facerank
