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

#include "facerank/face.hpp"

#include <algorithm>
#include <cmath>

#include "facerank/error.hpp"

namespace facerank {

VarianceCollapse variance_collapse(const ClassStats& stats, const NumericConfig& num) {
  const Matrix& sw = stats.sigma_w;
  const Matrix& sb = stats.sigma_b;
  if (sw.rows() != sb.rows() || sw.cols() != sb.cols()) {
    throw Error(ErrorKind::shape, "Sigma_W and Sigma_B dimensions differ");
  }
  VarianceCollapse out;
  out.means_collapsed = sb.trace() < kCollapsedMeansRatio * sw.trace();

  // trace of a product of two PSD matrices is >= 0; clip rounding noise.
  const double t = std::max(0.0, trace_of_product(sw, pinv_psd(sb, num.pinv_rel_tol)));
  out.score = t == 0.0 ? 0.0 : -t / static_cast<double>(stats.k_count());
  return out;
}

double bhattacharyya_diagonal(const Vector& mean_a, const Vector& var_a, const Vector& mean_b,
                              const Vector& var_b, double floor) {
  double quad = 0.0;
  double log_det_avg = 0.0;
  double log_det_a = 0.0;
  double log_det_b = 0.0;
  for (Eigen::Index c = 0; c < mean_a.size(); ++c) {
    const double avg = std::max(0.5 * (var_a[c] + var_b[c]), floor);
    const double diff = mean_a[c] - mean_b[c];
    quad += diff * diff / avg;
    log_det_avg += std::log(avg);
    log_det_a += std::log(std::max(var_a[c], floor));
    log_det_b += std::log(std::max(var_b[c], floor));
  }
  const double dist = quad / 8.0 + 0.5 * (log_det_avg - 0.5 * (log_det_a + log_det_b));
  // Flooring can push the log-det term marginally below its AM-GM bound.
  return std::max(dist, 0.0);
}

namespace {

OverlapMatrix from_distances(Matrix distances) {
  OverlapMatrix om;
  om.coefficients = (-distances.array()).exp().matrix();
  om.coefficients.diagonal().setOnes();
  om.distances = std::move(distances);
  return om;
}

Matrix distances_diagonal(const ClassStats& stats, double floor) {
  const int k_count = stats.k_count();
  Matrix dist = Matrix::Zero(k_count, k_count);
  for (int i = 0; i < k_count; ++i) {
    for (int j = i + 1; j < k_count; ++j) {
      const double v = bhattacharyya_diagonal(
          stats.class_means.row(i).transpose(), stats.class_var.row(i).transpose(),
          stats.class_means.row(j).transpose(), stats.class_var.row(j).transpose(), floor);
      dist(i, j) = dist(j, i) = v;
    }
  }
  return dist;
}

Matrix distances_full(const ClassStats& stats, const NumericConfig& num) {
  const int k_count = stats.k_count();
  if (static_cast<int>(stats.class_cov.size()) != k_count) {
    throw Error(ErrorKind::shape,
                "full-mode overlap needs class statistics computed with cov_mode=full");
  }
  const auto d = static_cast<double>(stats.dim());
  std::vector<Matrix> shrunk(k_count);
  std::vector<double> log_det(k_count);
  for (int k = 0; k < k_count; ++k) {
    const Matrix& cov = stats.class_cov[k];
    shrunk[k] = cov;
    shrunk[k].diagonal().array() += kFullShrinkage * cov.trace() / d;
    log_det[k] = log_det_psd(shrunk[k], num.logdet_floor);
  }

  Matrix dist = Matrix::Zero(k_count, k_count);
  for (int i = 0; i < k_count; ++i) {
    for (int j = i + 1; j < k_count; ++j) {
      const Matrix avg = 0.5 * (shrunk[i] + shrunk[j]);
      const Vector diff = (stats.class_means.row(i) - stats.class_means.row(j)).transpose();
      const double quad = diff.dot(pinv_psd(avg, num.pinv_rel_tol) * diff);
      const double v = quad / 8.0 +
                       0.5 * (log_det_psd(avg, num.logdet_floor) - 0.5 * (log_det[i] + log_det[j]));
      dist(i, j) = dist(j, i) = std::max(v, 0.0);
    }
  }
  return dist;
}

}  // namespace

OverlapMatrix overlap_matrix(const ClassStats& stats, CovMode mode, const NumericConfig& num) {
  if (stats.k_count() < 2) throw Error(ErrorKind::shape, "overlap needs at least two classes");
  if (mode == CovMode::full) return from_distances(distances_full(stats, num));
  return from_distances(distances_diagonal(stats, num.logdet_floor));
}

double class_fairness(const OverlapMatrix& om, const FairnessConfig& cfg) {
  const Matrix& b = om.coefficients;
  if (b.rows() != b.cols()) throw Error(ErrorKind::shape, "overlap matrix is not square");
  if (b.rows() < 2) throw Error(ErrorKind::shape, "class fairness needs K >= 2");
  if (!b.allFinite()) throw Error(ErrorKind::data, "overlap matrix has non-finite entries");
  if (!(cfg.temperature > 0)) throw Error(ErrorKind::range, "temperature must be positive");

  const Eigen::Index k_count = b.rows();
  double total = 0.0;
  std::vector<double> logits;
  for (Eigen::Index i = 0; i < k_count; ++i) {
    logits.clear();
    for (Eigen::Index j = 0; j < k_count; ++j) {
      if (cfg.exclude_self && j == i) continue;
      logits.push_back(b(i, j) / cfg.temperature);
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - top);
    const double log_z = std::log(z);
    // H = -sum p log p with log p = (l - top) - log z.
    double entropy = 0.0;
    for (double l : logits) {
      const double log_p = (l - top) - log_z;
      entropy -= std::exp(log_p) * log_p;
    }
    total += entropy;
  }
  return total / static_cast<double>(k_count);
}

namespace {

// Normalised values for one term; nullopt where the model lacks the term.
std::vector<std::optional<double>> min_max(const std::vector<std::optional<double>>& values) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& v : values) {
    if (!v) continue;
    if (!std::isfinite(*v)) throw Error(ErrorKind::data, "non-finite raw score");
    if (!any) {
      lo = hi = *v;
      any = true;
    } else {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  std::vector<std::optional<double>> out(values.size());
  for (std::size_t m = 0; m < values.size(); ++m) {
    if (!values[m]) continue;
    out[m] = hi == lo ? 0.5 : (*values[m] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace

std::vector<ScoreReport> fuse_scores(const std::vector<RawScore>& raw) {
  if (raw.empty()) throw Error(ErrorKind::shape, "fuse_scores needs at least one model");
  std::vector<std::optional<double>> cs;
  std::vector<std::optional<double>> fs;
  for (const auto& r : raw) {
    cs.push_back(r.c);
    fs.push_back(r.f);
  }
  const auto norm_c = min_max(cs);
  const auto norm_f = min_max(fs);

  std::vector<ScoreReport> out(raw.size());
  for (std::size_t m = 0; m < raw.size(); ++m) {
    auto& rep = out[m];
    rep.model_id = raw[m].model_id;
    rep.raw_c = raw[m].c;
    rep.raw_f = raw[m].f;
    rep.norm_c = norm_c[m];
    rep.norm_f = norm_f[m];
    if (rep.norm_c && rep.norm_f) rep.face = *rep.norm_c + *rep.norm_f;
  }
  return out;
}

double etf_distance(const Matrix& class_means, const Vector& global_mean) {
  const Eigen::Index k_count = class_means.rows();
  if (k_count < 2) throw Error(ErrorKind::shape, "etf_distance needs K >= 2");
  if (class_means.cols() != global_mean.size()) {
    throw Error(ErrorKind::shape, "class means and global mean dimensions differ");
  }
  const Matrix centered = class_means.rowwise() - global_mean.transpose();
  const Matrix gram = centered * centered.transpose();
  const double norm = gram.norm();
  if (!(norm > 0)) throw Error(ErrorKind::degenerate, "class means coincide; Gram matrix is zero");

  const double k = static_cast<double>(k_count);
  const Matrix etf = (Matrix::Identity(k_count, k_count) -
                      Matrix::Constant(k_count, k_count, 1.0 / k)) /
                     std::sqrt(k - 1.0);
  return (gram / norm - etf).norm();
}

}  // namespace facerank
