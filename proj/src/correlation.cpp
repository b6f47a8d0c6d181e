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

#include "facerank/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "facerank/error.hpp"

namespace facerank {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::shape, "correlation inputs differ in length (" +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw Error(ErrorKind::evaluation, "correlation needs at least two models");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw Error(ErrorKind::data, "correlation input is not finite");
    }
  }
}

int sign(double v) { return (v > 0) - (v < 0); }

// Zero-based ranks in descending order; tied values share the mean rank.
std::vector<double> descending_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j);
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double weighted_kendall(std::span<const double> scores, std::span<const double> accuracies,
                        KendallWeights weights) {
  check_pair(scores, accuracies);
  const auto ranks = descending_ranks(accuracies);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      const double w = weights == KendallWeights::uniform
                           ? 1.0
                           : 1.0 / (1.0 + ranks[i]) + 1.0 / (1.0 + ranks[j]);
      num += w * sign(scores[i] - scores[j]) * sign(accuracies[i] - accuracies[j]);
      den += w;
    }
  }
  return num / den;
}

double pearson(std::span<const double> scores, std::span<const double> accuracies) {
  check_pair(scores, accuracies);
  const auto n = static_cast<double>(scores.size());
  const double mean_s = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  const double mean_a = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double ds = scores[i] - mean_s;
    const double da = accuracies[i] - mean_a;
    sxy += ds * da;
    sxx += ds * ds;
    syy += da * da;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::degenerate, "Pearson correlation is undefined for a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace facerank
