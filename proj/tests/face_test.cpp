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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "facerank/error.hpp"
#include "facerank/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace facerank {
namespace {

using testing::make_featureset;
using testing::random_featureset;

// Textbook closed form with LU determinants and a dense inverse.
double oracle_bhattacharyya(const Vector& ma, const Matrix& ca, const Vector& mb,
                            const Matrix& cb) {
  const Matrix avg = 0.5 * (ca + cb);
  const Vector diff = ma - mb;
  return 0.125 * diff.dot(avg.inverse() * diff) +
         0.5 * std::log(avg.determinant() / std::sqrt(ca.determinant() * cb.determinant()));
}

OverlapMatrix from_coefficients(const Matrix& b) {
  OverlapMatrix om;
  om.coefficients = b;
  om.distances = -b.array().log().matrix();
  return om;
}

Matrix random_orthogonal(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

FeatureSet two_class_1d(std::vector<double> a, std::vector<double> b) {
  Matrix x(a.size() + b.size(), 1);
  std::vector<std::int32_t> labels;
  Eigen::Index row = 0;
  for (double v : a) {
    x(row++, 0) = v;
    labels.push_back(0);
  }
  for (double v : b) {
    x(row++, 0) = v;
    labels.push_back(1);
  }
  return make_featureset(x, labels);
}

TEST(VarianceCollapse, HandInstance) {
  const FeatureSet fs = two_class_1d({1, 3}, {-1, -3});
  const VarianceCollapse vc = variance_collapse(class_statistics(fs));
  EXPECT_NEAR(vc.score, -0.125, 1e-12);
  EXPECT_NEAR(oracle::variance_collapse(fs), -0.125, 1e-12);
  EXPECT_FALSE(vc.means_collapsed);
}

TEST(VarianceCollapse, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 8;
    const int k = 2 + trial % 4;
    const FeatureSet fs = random_featureset(rng, 20 + 7 * (trial % 5), d, k, 2.0);
    const double got = variance_collapse(class_statistics(fs)).score;
    const double want = oracle::variance_collapse(fs);
    EXPECT_LE(std::abs(got - want), 1e-8 * std::abs(want)) << "trial " << trial;
  }
}

TEST(VarianceCollapse, PerfectCollapseIsZero) {
  const VarianceCollapse vc = variance_collapse(class_statistics(two_class_1d({2, 2}, {-5, -5})));
  EXPECT_EQ(vc.score, 0.0);
  EXPECT_FALSE(std::signbit(vc.score));
}

TEST(VarianceCollapse, CollapsedMeansFlagged) {
  const VarianceCollapse vc = variance_collapse(class_statistics(two_class_1d({-1, 1}, {-2, 2})));
  EXPECT_EQ(vc.score, 0.0);
  EXPECT_TRUE(vc.means_collapsed);
}

TEST(VarianceCollapse, RotationAndTranslationInvariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 6;
    FeatureSet fs = random_featureset(rng, 60, d, 3);
    const double base = variance_collapse(class_statistics(fs)).score;

    FeatureSet rotated = fs;
    rotated.features = fs.features * random_orthogonal(rng, d);
    EXPECT_NEAR(variance_collapse(class_statistics(rotated)).score, base, 1e-8);

    FeatureSet shifted = fs;
    Eigen::RowVectorXd offset = Eigen::RowVectorXd::Constant(d, 37.5);
    offset[0] = -12.0;
    shifted.features = fs.features.rowwise() + offset;
    EXPECT_NEAR(variance_collapse(class_statistics(shifted)).score, base, 1e-8);
  }
}

TEST(VarianceCollapse, DecreasesWithNoise) {
  SynthSpec spec;
  spec.k_count = 4;
  spec.dim = 8;
  spec.samples_per_class = 200;
  spec.seed = 3;
  double previous = 1.0;
  for (double variance : {0.1, 0.5, 1.0, 2.0}) {
    spec.noise_sigma = std::sqrt(variance);
    const double c = variance_collapse(class_statistics(gen_featureset(spec))).score;
    EXPECT_LT(c, previous) << "variance " << variance;
    previous = c;
  }
}

TEST(Bhattacharyya, IdenticalGaussians) {
  const OverlapMatrix om =
      overlap_matrix(class_statistics(two_class_1d({-1, 1}, {-1, 1})), CovMode::diagonal);
  EXPECT_EQ(om.distances(0, 1), 0.0);
  EXPECT_EQ(om.coefficients(0, 1), 1.0);
}

TEST(Bhattacharyya, HandInstances) {
  const ClassStats shifted = class_statistics(two_class_1d({-1, 1}, {1, 3}), CovMode::full);
  for (CovMode mode : {CovMode::diagonal, CovMode::full}) {
    const OverlapMatrix om = overlap_matrix(shifted, mode);
    // Full mode adds a 1e-4 relative ridge to each covariance.
    const double tol = mode == CovMode::diagonal ? 1e-12 : 1e-4;
    EXPECT_NEAR(om.distances(0, 1), 0.5, tol);
    EXPECT_NEAR(om.coefficients(0, 1), std::exp(-0.5), tol);
    EXPECT_NEAR(om.coefficients(0, 1), 0.60653, 1e-4);
  }

  const double r3 = std::sqrt(3.0);
  const ClassStats spread = class_statistics(two_class_1d({-1, 1}, {-r3, r3}));
  const OverlapMatrix om = overlap_matrix(spread, CovMode::diagonal);
  EXPECT_NEAR(om.distances(0, 1), 0.5 * std::log(2.0 / r3), 1e-12);
  EXPECT_NEAR(om.distances(0, 1), 0.07192, 1e-5);
}

TEST(Bhattacharyya, DiagonalMatchesMonteCarlo) {
  std::mt19937_64 rng(2024);
  Vector ma(2), va(2), mb(2), vb(2);
  ma << 0.0, 0.5;
  va << 1.0, 0.5;
  mb << 1.0, -0.5;
  vb << 2.0, 1.5;
  const double mc = oracle::bhattacharyya_coefficient_mc(ma, va, mb, vb, 200000, rng);
  EXPECT_NEAR(std::exp(-bhattacharyya_diagonal(ma, va, mb, vb)), mc, 0.01);
}

TEST(Bhattacharyya, FullModeMatchesClosedForm) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureSet fs = random_featureset(rng, 300, 3, 3);
    const ClassStats st = class_statistics(fs, CovMode::full);
    const OverlapMatrix om = overlap_matrix(st, CovMode::full);
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        auto ridge = [&](const Matrix& c) {
          return Matrix(c + kFullShrinkage * c.trace() / 3.0 * Matrix::Identity(3, 3));
        };
        const double want = oracle_bhattacharyya(st.class_means.row(a).transpose(),
                                                 ridge(st.class_cov[a]),
                                                 st.class_means.row(b).transpose(),
                                                 ridge(st.class_cov[b]));
        EXPECT_NEAR(om.distances(a, b), want, 1e-9);
      }
    }
  }
}

TEST(OverlapMatrix, StructuralProperties) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureSet fs = random_featureset(rng, 80, 4, 4, 1.5);
    for (CovMode mode : {CovMode::diagonal, CovMode::full}) {
      const OverlapMatrix om = overlap_matrix(class_statistics(fs, mode), mode);
      for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(om.coefficients(i, i), 1.0);
        for (int j = 0; j < 4; ++j) {
          EXPECT_EQ(om.coefficients(i, j), om.coefficients(j, i));
          EXPECT_GT(om.coefficients(i, j), 0.0);
          EXPECT_LE(om.coefficients(i, j), 1.0);
          EXPECT_DOUBLE_EQ(om.coefficients(i, j), std::exp(-om.distances(i, j)));
        }
      }
    }
  }
}

TEST(OverlapMatrix, ClassPermutationPermutesRowsAndColumns) {
  std::mt19937_64 rng(17);
  const FeatureSet fs = random_featureset(rng, 90, 3, 4, 1.5);
  const std::vector<std::int32_t> perm = {2, 0, 3, 1};
  FeatureSet relabelled = fs;
  for (auto& y : relabelled.labels) y = perm[y];
  for (CovMode mode : {CovMode::diagonal, CovMode::full}) {
    const OverlapMatrix a = overlap_matrix(class_statistics(fs, mode), mode);
    const OverlapMatrix b = overlap_matrix(class_statistics(relabelled, mode), mode);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        EXPECT_NEAR(b.distances(perm[i], perm[j]), a.distances(i, j), 1e-12);
      }
    }
  }
}

TEST(OverlapMatrix, FullModeNeedsFullStats) {
  const ClassStats st = class_statistics(two_class_1d({-1, 1}, {1, 3}), CovMode::diagonal);
  EXPECT_THROW(overlap_matrix(st, CovMode::full), Error);
}

TEST(ClassFairness, ConstantRowsGiveLogK) {
  Matrix b = Matrix::Ones(3, 3);
  EXPECT_NEAR(class_fairness(from_coefficients(b)), std::log(3.0), 1e-12);
  EXPECT_NEAR(class_fairness(from_coefficients(b)), 1.09861, 1e-5);
}

TEST(ClassFairness, TwoClassHandInstance) {
  Matrix b(2, 2);
  b << 1, 0.5, 0.5, 1;
  const double f = class_fairness(from_coefficients(b));
  // Reference entropy of softmax{20, 10} evaluated at 30 significant digits.
  EXPECT_NEAR(f, 4.99377586241208592e-4, 1e-15);
  EXPECT_NEAR(f, oracle::class_fairness(b, 0.05), 1e-15);
}

TEST(ClassFairness, UnevenOverlapBelowMaximum) {
  Matrix b(3, 3);
  b << 1, 0.9, 0.1, 0.9, 1, 0.2, 0.1, 0.2, 1;
  EXPECT_LT(class_fairness(from_coefficients(b)), std::log(3.0));
}

TEST(ClassFairness, BoundedByLogKAndMatchesOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(1e-6, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 7;
    Matrix b = Matrix::Ones(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) b(i, j) = b(j, i) = unit(rng);
    }
    const double f = class_fairness(from_coefficients(b));
    EXPECT_LE(f, std::log(static_cast<double>(k)) + 1e-12);
    EXPECT_NEAR(f, oracle::class_fairness(b, 0.05), 1e-12);
  }
}

TEST(ClassFairness, ExcludeSelfDropsDiagonal) {
  Matrix b(3, 3);
  b << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  FairnessConfig cfg;
  cfg.exclude_self = true;
  EXPECT_NEAR(class_fairness(from_coefficients(b), cfg), std::log(2.0), 1e-12);
}

TEST(ClassFairness, RejectsBadInput) {
  EXPECT_THROW(class_fairness(from_coefficients(Matrix::Ones(1, 1))), Error);
  FairnessConfig cold;
  cold.temperature = 0.0;
  EXPECT_THROW(class_fairness(from_coefficients(Matrix::Ones(2, 2)), cold), Error);
}

std::vector<RawScore> raw_scores(const std::vector<double>& c, const std::vector<double>& f) {
  std::vector<RawScore> raw;
  for (std::size_t i = 0; i < c.size(); ++i) raw.push_back({"m" + std::to_string(i), c[i], f[i]});
  return raw;
}

TEST(FuseScores, BalancedExample) {
  const auto out = fuse_scores(raw_scores({0, 1, 2}, {2, 1, 0}));
  const double norm_c[] = {0, 0.5, 1};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(*out[i].norm_c, norm_c[i]);
    EXPECT_EQ(*out[i].norm_f, norm_c[2 - i]);
    EXPECT_EQ(*out[i].face, 1.0);
  }
}

TEST(FuseScores, SingleModelUsesTieRule) {
  const auto out = fuse_scores(raw_scores({-3.0}, {0.2}));
  EXPECT_EQ(*out[0].norm_c, 0.5);
  EXPECT_EQ(*out[0].norm_f, 0.5);
  EXPECT_EQ(*out[0].face, 1.0);
}

TEST(FuseScores, TiedFairness) {
  const double ln2 = std::log(2.0);
  const auto out = fuse_scores(raw_scores({-0.125, 0.0}, {ln2, ln2}));
  EXPECT_EQ(*out[0].norm_c, 0.0);
  EXPECT_EQ(*out[1].norm_c, 1.0);
  EXPECT_EQ(*out[0].face, 0.5);
  EXPECT_EQ(*out[1].face, 1.5);
}

TEST(FuseScores, MissingTermLeavesFaceAbsent) {
  std::vector<RawScore> raw = {{"a", -1.0, std::nullopt}, {"b", -2.0, std::nullopt}};
  const auto out = fuse_scores(raw);
  EXPECT_EQ(*out[0].norm_c, 1.0);
  EXPECT_FALSE(out[0].norm_f.has_value());
  EXPECT_FALSE(out[0].face.has_value());
}

TEST(FuseScores, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(fuse_scores({}), Error);
  EXPECT_THROW(fuse_scores(raw_scores({0.0, std::nan("")}, {1.0, 2.0})), Error);
}

TEST(FuseScores, RankingInvariantUnderAffineTransforms) {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int zoo = 0; zoo < 50; ++zoo) {
    const int m = 2 + zoo % 9;
    std::vector<double> c(m), f(m), c2(m), f2(m);
    const double ac = scale(rng), bc = 5 * normal(rng);
    const double af = scale(rng), bf = 5 * normal(rng);
    for (int i = 0; i < m; ++i) {
      c[i] = normal(rng);
      f[i] = normal(rng);
      c2[i] = ac * c[i] + bc;
      f2[i] = af * f[i] + bf;
    }
    const auto a = fuse_scores(raw_scores(c, f));
    const auto b = fuse_scores(raw_scores(c2, f2));
    for (int i = 0; i < m; ++i) EXPECT_NEAR(*a[i].face, *b[i].face, 1e-9);
  }
}

TEST(EtfDistance, Examples) {
  Matrix means(2, 1);
  means << 1, -1;
  EXPECT_NEAR(etf_distance(means, Vector::Zero(1)), 0.0, 1e-15);

  means << 1, 0;
  EXPECT_NEAR(etf_distance(means, Vector::Zero(1)), 1.0, 1e-15);

  // Centred standard basis vectors form a simplex ETF at any scale.
  for (double s : {0.01, 1.0, 250.0}) {
    const Matrix vertices = s * Matrix::Identity(5, 5);
    const Vector centroid = vertices.colwise().mean().transpose();
    EXPECT_NEAR(etf_distance(vertices, centroid), 0.0, 1e-12);
  }
}

TEST(EtfDistance, ScaleInvariantAndDegenerate) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) means(i, j) = normal(rng);
  }
  const Vector g = means.colwise().mean().transpose();
  const double base = etf_distance(means, g);
  for (double c : {-3.0, 0.5, 1e3}) EXPECT_NEAR(etf_distance(c * means, c * g), base, 1e-12);

  try {
    etf_distance(Matrix::Ones(3, 2), Vector::Ones(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

}  // namespace
}  // namespace facerank
