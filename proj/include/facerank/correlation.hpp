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

#include <map>
#include <optional>
#include <span>
#include <string>

namespace facerank {

enum class KendallWeights {
  hyperbolic,  // w_ij = 1/(1 + r_i) + 1/(1 + r_j), r = descending accuracy rank
  uniform,     // plain Kendall tau-a
};

// Weighted Kendall rank correlation of `scores` against `accuracies`.
// Pairs tied in either vector add weight to the denominator only.
double weighted_kendall(std::span<const double> scores, std::span<const double> accuracies,
                        KendallWeights weights = KendallWeights::hyperbolic);

// Sample Pearson correlation. Throws Error{degenerate} on a constant input.
double pearson(std::span<const double> scores, std::span<const double> accuracies);

struct MetricCorrelation {
  double tau_w = 0.0;
  std::optional<double> pearson;  // absent when the metric's scores are constant
};

struct CorrelationReport {
  std::string primary_metric;
  double tau_w = 0.0;
  std::optional<double> pearson;
  int model_count = 0;
  int excluded_models = 0;  // models without a ground-truth accuracy
  std::map<std::string, MetricCorrelation> per_metric;
};

}  // namespace facerank
