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

#include "facerank/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "facerank/error.hpp"

namespace facerank {

void validate(const SourcePredictions& preds, double row_sum_tol) {
  if (preds.source_class_count() < 2) {
    throw Error(ErrorKind::shape, "source predictions need at least two source classes");
  }
  if (!preds.probs.allFinite()) throw Error(ErrorKind::data, "predictions contain NaN or Inf");
  for (Eigen::Index i = 0; i < preds.n(); ++i) {
    const auto row = preds.probs.row(i);
    if (row.minCoeff() < 0.0 || row.maxCoeff() > 1.0) {
      throw Error(ErrorKind::range, "prediction row " + std::to_string(i) + " leaves [0, 1]");
    }
    if (std::abs(row.sum() - 1.0) > row_sum_tol) {
      throw Error(ErrorKind::range, "prediction row " + std::to_string(i) + " sums to " +
                                        std::to_string(row.sum()));
    }
  }
}

std::vector<std::int32_t> hard_labels(const SourcePredictions& preds) {
  std::vector<std::int32_t> out(preds.n());
  for (Eigen::Index i = 0; i < preds.n(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index z = 1; z < preds.source_class_count(); ++z) {
      if (preds.probs(i, z) > preds.probs(i, best)) best = z;
    }
    out[i] = static_cast<std::int32_t>(best);
  }
  return out;
}

namespace {

int label_count(std::span<const std::int32_t> labels) {
  std::int32_t top = -1;
  for (auto y : labels) {
    if (y < 0) throw Error(ErrorKind::data, "negative label");
    top = std::max(top, y);
  }
  return top + 1;
}

}  // namespace

double leep(const SourcePredictions& preds, std::span<const std::int32_t> labels) {
  const Eigen::Index n = preds.n();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw Error(ErrorKind::shape, "LEEP: " + std::to_string(n) + " prediction rows vs " +
                                      std::to_string(labels.size()) + " labels");
  }
  if (n == 0) throw Error(ErrorKind::shape, "LEEP: empty input");
  const int k_count = label_count(labels);
  const Eigen::Index z_count = preds.source_class_count();

  // joint(y, z) = (1/n) sum_i theta_iz [y_i = y]
  Matrix joint = Matrix::Zero(k_count, z_count);
  for (Eigen::Index i = 0; i < n; ++i) joint.row(labels[i]) += preds.probs.row(i);
  joint /= static_cast<double>(n);
  const Eigen::RowVectorXd marginal = joint.colwise().sum();

  Matrix conditional = Matrix::Zero(k_count, z_count);  // P(y | z)
  for (Eigen::Index z = 0; z < z_count; ++z) {
    if (marginal[z] > 0) conditional.col(z) = joint.col(z) / marginal[z];
  }

  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eep = conditional.row(labels[i]).dot(preds.probs.row(i));
    acc += std::log(std::max(eep, kProbFloor));
  }
  return std::min(acc / static_cast<double>(n), 0.0);
}

double nce(std::span<const std::int32_t> source_labels, std::span<const std::int32_t> labels) {
  if (source_labels.size() != labels.size()) {
    throw Error(ErrorKind::shape, "NCE: source and target label counts differ");
  }
  if (labels.empty()) throw Error(ErrorKind::shape, "NCE: empty input");
  const int z_count = label_count(source_labels);
  const int k_count = label_count(labels);
  const auto n = static_cast<double>(labels.size());

  Matrix joint = Matrix::Zero(z_count, k_count);
  for (std::size_t i = 0; i < labels.size(); ++i) joint(source_labels[i], labels[i]) += 1.0;
  joint /= n;
  const Vector marginal = joint.rowwise().sum();

  double h = 0.0;  // H(Y | Z)
  for (int z = 0; z < z_count; ++z) {
    for (int y = 0; y < k_count; ++y) {
      const double p = joint(z, y);
      if (p == 0.0) continue;
      h -= p * std::log(std::max(p / marginal[z], kProbFloor));
    }
  }
  return h == 0.0 ? 0.0 : -h;
}

namespace {

struct EigenBasis {
  Vector sigma;  // eigenvalues of F^T F, rank-truncated
  Matrix vectors;
};

EigenBasis gram_basis(const Matrix& features) {
  const Matrix gram = features.transpose() * features;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  EigenBasis out{eig.eigenvalues(), eig.eigenvectors()};
  const double top = out.sigma.size() ? out.sigma.maxCoeff() : 0.0;
  const double cutoff = top > 0 ? kPinvRelTol * top : 0.0;
  for (auto& s : out.sigma) {
    if (!(s > cutoff)) s = 0.0;
  }
  return out;
}

// Sufficient statistics of one target column y in the eigenbasis:
// proj2[i] = (v_i^T F^T y)^2 / sigma_i, and the part of ||y||^2 that no
// feature direction explains.
struct Projection {
  Vector proj2;
  double residual = 0.0;
};

Projection project(const EigenBasis& basis, const Matrix& features, const Vector& y) {
  const Vector t = basis.vectors.transpose() * (features.transpose() * y);
  Projection p;
  p.proj2 = Vector::Zero(t.size());
  double explained = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (basis.sigma[i] > 0) {
      p.proj2[i] = t[i] * t[i] / basis.sigma[i];
      explained += p.proj2[i];
    }
  }
  p.residual = std::max(y.squaredNorm() - explained, 0.0);
  return p;
}

struct Moments {
  double gamma = 0.0;     // effective number of parameters
  double weight2 = 0.0;   // ||m||^2
  double residual2 = 0.0; // ||y - F m||^2
};

Moments moments(const EigenBasis& basis, const Projection& p, double alpha, double beta) {
  Moments m;
  for (Eigen::Index i = 0; i < basis.sigma.size(); ++i) {
    const double s = basis.sigma[i];
    const double denom = alpha + beta * s;
    m.gamma += beta * s / denom;
    m.weight2 += beta * beta * s * p.proj2[i] / (denom * denom);
    const double shrink = alpha / denom;
    m.residual2 += shrink * shrink * p.proj2[i];
  }
  m.residual2 += p.residual;
  return m;
}

double evidence_per_sample(const EigenBasis& basis, const Moments& m, double alpha, double beta,
                           double n) {
  // d/2 log(alpha) - 1/2 log|alpha I + beta F^T F|, folded per direction so
  // that null directions cancel exactly.
  double log_det_term = 0.0;
  for (double s : basis.sigma) {
    if (s > 0) log_det_term -= 0.5 * std::log1p(beta * s / alpha);
  }
  const double ev = log_det_term + 0.5 * n * std::log(beta) -
                    0.5 * beta * (m.residual2 + kLogMeEpsilon) -
                    0.5 * alpha * (m.weight2 + kLogMeEpsilon) -
                    0.5 * n * std::log(2.0 * std::numbers::pi);
  return ev / n;
}

}  // namespace

LogMeResult logme(const FeatureSet& fs) {
  validate(fs);
  const Matrix& f = fs.features;
  const auto n = static_cast<double>(fs.n());
  const EigenBasis basis = gram_basis(f);

  LogMeResult out;
  double total = 0.0;
  for (int k = 0; k < fs.k_count; ++k) {
    Vector y(fs.n());
    for (Eigen::Index i = 0; i < fs.n(); ++i) y[i] = fs.labels[i] == k ? 1.0 : 0.0;
    const Projection p = project(basis, f, y);

    double alpha = 1.0;
    double beta = 1.0;
    double ev = evidence_per_sample(basis, moments(basis, p, alpha, beta), alpha, beta, n);
    bool converged = false;
    int it = 0;
    while (it < kLogMeMaxIterations) {
      ++it;
      const Moments m = moments(basis, p, alpha, beta);
      alpha = m.gamma / (m.weight2 + kLogMeEpsilon);
      beta = (n - m.gamma) / (m.residual2 + kLogMeEpsilon);
      if (alpha <= 0.0) {
        // No feature direction carries signal: the alpha terms vanish.
        alpha = 1.0;
      }
      const double next = evidence_per_sample(basis, moments(basis, p, alpha, beta), alpha, beta, n);
      const double delta = std::abs(next - ev);
      ev = next;
      if (delta < kLogMeTol) {
        converged = true;
        break;
      }
    }
    out.converged = out.converged && converged;
    out.max_iterations_used = std::max(out.max_iterations_used, it);
    total += ev;
  }
  out.value = total / static_cast<double>(fs.k_count);
  return out;
}

double hscore(const FeatureSet& fs, double rel_tol) {
  validate(fs);
  const auto n = static_cast<double>(fs.n());
  const Vector mean = fs.features.colwise().mean().transpose();
  const Matrix centered = fs.features.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / n;
  cov = (0.5 * (cov + cov.transpose())).eval();

  Matrix class_sums = Matrix::Zero(fs.k_count, fs.d());
  std::vector<double> counts(fs.k_count, 0.0);
  for (Eigen::Index i = 0; i < fs.n(); ++i) {
    class_sums.row(fs.labels[i]) += fs.features.row(i);
    counts[fs.labels[i]] += 1.0;
  }
  // Replacing each sample by its class mean leaves a covariance of
  // sum_k (n_k / n) (mu_k - mu)(mu_k - mu)^T.
  Matrix weighted(fs.k_count, fs.d());
  for (int k = 0; k < fs.k_count; ++k) {
    weighted.row(k) = (class_sums.row(k) / counts[k] - mean.transpose()) * std::sqrt(counts[k] / n);
  }
  const Matrix cov_between = weighted.transpose() * weighted;
  return std::max(0.0, trace_of_product(pinv_psd(cov, rel_tol), cov_between));
}

double gbc(const OverlapMatrix& om) {
  const Matrix& b = om.coefficients;
  if (b.rows() != b.cols() || b.rows() < 2) throw Error(ErrorKind::shape, "GBC needs a KxK overlap, K >= 2");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < b.cols(); ++j) acc += b(i, j);
  }
  return -acc;
}

}  // namespace facerank
