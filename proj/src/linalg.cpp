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

#include "facerank/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "facerank/error.hpp"

namespace facerank {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::data: return "data";
    case ErrorKind::missing_class: return "missing_class";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::format: return "format";
    case ErrorKind::truncated: return "truncated";
    case ErrorKind::io: return "io";
    case ErrorKind::manifest: return "manifest";
    case ErrorKind::duplicate_id: return "duplicate_id";
    case ErrorKind::missing_file: return "missing_file";
    case ErrorKind::range: return "range";
    case ErrorKind::evaluation: return "evaluation";
  }
  return "unknown";
}

const char* to_string(CovMode mode) {
  return mode == CovMode::full ? "full" : "diagonal";
}

CovMode parse_cov_mode(const std::string& text) {
  if (text == "diagonal") return CovMode::diagonal;
  if (text == "full") return CovMode::full;
  throw Error(ErrorKind::range, "unknown cov_mode '" + text + "' (expected diagonal|full)");
}

void validate(const FeatureSet& fs) {
  const auto n = fs.n();
  if (fs.d() < 1) throw Error(ErrorKind::shape, "feature dimension must be >= 1");
  if (fs.k_count < 2) throw Error(ErrorKind::shape, "at least two classes are required");
  if (static_cast<Eigen::Index>(fs.labels.size()) != n) {
    throw Error(ErrorKind::shape, "label count " + std::to_string(fs.labels.size()) +
                                      " does not match row count " + std::to_string(n));
  }
  if (n < fs.k_count) throw Error(ErrorKind::shape, "fewer samples than classes");
  if (!fs.features.allFinite()) throw Error(ErrorKind::data, "features contain NaN or Inf");

  std::vector<Eigen::Index> counts(fs.k_count, 0);
  for (auto y : fs.labels) {
    if (y < 0 || y >= fs.k_count) {
      throw Error(ErrorKind::data, "label " + std::to_string(y) + " outside [0, " +
                                       std::to_string(fs.k_count - 1) + "]");
    }
    ++counts[y];
  }
  for (int k = 0; k < fs.k_count; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorKind::missing_class, "class " + std::to_string(k) + " has no samples");
    }
  }
}

ClassStats class_statistics(const FeatureSet& fs, CovMode mode) {
  validate(fs);
  const int k_count = fs.k_count;
  const Eigen::Index d = fs.d();

  ClassStats st;
  st.mode = mode;
  st.global_mean = fs.features.colwise().mean().transpose();
  st.class_means = Matrix::Zero(k_count, d);
  st.class_var = Matrix::Zero(k_count, d);
  st.sigma_w = Matrix::Zero(d, d);
  st.class_counts.assign(k_count, 0);

  std::vector<std::vector<Eigen::Index>> rows(k_count);
  for (Eigen::Index i = 0; i < fs.n(); ++i) rows[fs.labels[i]].push_back(i);

  for (int k = 0; k < k_count; ++k) {
    const auto nk = static_cast<Eigen::Index>(rows[k].size());
    st.class_counts[k] = nk;
    Matrix centered = fs.features(rows[k], Eigen::all);
    const Vector mean = centered.colwise().mean().transpose();
    centered.rowwise() -= mean.transpose();
    st.class_means.row(k) = mean.transpose();
    st.class_var.row(k) = centered.colwise().squaredNorm() / static_cast<double>(nk);

    Matrix cov = (centered.transpose() * centered) / static_cast<double>(nk);
    cov = (0.5 * (cov + cov.transpose())).eval();
    // Keep the diagonal identical to the diagonal-mode variances.
    cov.diagonal() = st.class_var.row(k).transpose();
    st.sigma_w += cov;
    if (mode == CovMode::full) st.class_cov.push_back(std::move(cov));
  }
  st.sigma_w /= static_cast<double>(k_count);

  const Matrix centered_means = st.class_means.rowwise() - st.global_mean.transpose();
  st.sigma_b = (centered_means.transpose() * centered_means) / static_cast<double>(k_count);
  st.sigma_b = (0.5 * (st.sigma_b + st.sigma_b.transpose())).eval();
  return st;
}

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::shape, "matrix is " + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()) + ", expected square");
  }
  if (m.size() == 0) return;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol)) {
    throw Error(ErrorKind::shape, "matrix is not symmetric (max |m - m^T| = " +
                                      std::to_string(asym) + ")");
  }
}

Matrix pinv_psd(const Matrix& m, double rel_tol) {
  check_symmetric(m);
  if (!(rel_tol > 0)) throw Error(ErrorKind::range, "pinv_psd: rel_tol must be positive");
  if (m.size() == 0) return m;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0)) return Matrix::Zero(m.rows(), m.cols());

  const double cutoff = rel_tol * top;
  Vector inv(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    inv[i] = lambda[i] > cutoff ? 1.0 / lambda[i] : 0.0;
  }
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * inv.asDiagonal() * v.transpose();
  return (out + out.transpose()) * 0.5;
}

double log_det_psd(const Matrix& m, double floor) {
  check_symmetric(m);
  if (!(floor > 0)) throw Error(ErrorKind::range, "log_det_psd: floor must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (double lambda : eig.eigenvalues()) acc += std::log(std::max(lambda, floor));
  return acc;
}

double log_det_psd(const Vector& diag, double floor) {
  if (!(floor > 0)) throw Error(ErrorKind::range, "log_det_psd: floor must be positive");
  double acc = 0.0;
  for (double v : diag) acc += std::log(std::max(v, floor));
  return acc;
}

}  // namespace facerank
