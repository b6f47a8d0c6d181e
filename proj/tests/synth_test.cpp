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

#include "facerank/synth.hpp"

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "facerank/error.hpp"
#include "facerank/face.hpp"
#include "test_util.hpp"

namespace facerank {
namespace {

using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double fairness_of(const SynthSpec& spec, bool exclude_self = false) {
  const ClassStats st = class_statistics(gen_featureset(spec));
  FairnessConfig cfg;
  cfg.exclude_self = exclude_self;
  return class_fairness(overlap_matrix(st, CovMode::diagonal), cfg);
}

TEST(CounterRng, MatchesSplitMix64Reference) {
  CounterRng rng(0);
  EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(rng.next_u64(), 0x06C45D188009454Full);
}

TEST(CounterRng, UniformAndNormalMoments) {
  CounterRng rng(17);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);

  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum2 / n, 1.0, 0.02);
}

TEST(PlantedMeans, SimplexGeometryAndSkew) {
  SynthSpec spec;
  spec.k_count = 5;
  spec.dim = 6;
  spec.separation = 3.0;
  const Matrix m = planted_means(spec);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(m(i, 5), 0.0);
    for (int j = i + 1; j < 5; ++j) EXPECT_NEAR((m.row(i) - m.row(j)).norm(), 3.0, 1e-12);
  }
  spec.fairness_skew = 0.9;
  const Matrix s = planted_means(spec);
  EXPECT_NEAR((s.row(4) - s.row(3)).norm(), 0.3, 1e-12);
  EXPECT_EQ(s.topRows(4), m.topRows(4));
}

TEST(GenFeatureset, Deterministic) {
  SynthSpec spec;
  spec.seed = 42;
  const FeatureSet a = gen_featureset(spec);
  const FeatureSet b = gen_featureset(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  spec.seed = 43;
  EXPECT_NE(gen_featureset(spec).features, a.features);
}

TEST(GenFeatureset, ZeroNoiseCollapses) {
  SynthSpec spec;
  spec.noise_sigma = 0.0;
  const FeatureSet fs = gen_featureset(spec);
  const Matrix means = planted_means(spec);
  for (Eigen::Index i = 0; i < fs.n(); ++i) EXPECT_EQ(fs.features.row(i), means.row(fs.labels[i]));
  EXPECT_NEAR(variance_collapse(class_statistics(fs)).score, 0.0, 1e-20);
}

TEST(GenFeatureset, QuieterSetCollapsesMore) {
  SynthSpec quiet, loud;
  quiet.noise_sigma = 0.5;
  loud.noise_sigma = 2.0;
  EXPECT_GT(variance_collapse(class_statistics(gen_featureset(quiet))).score,
            variance_collapse(class_statistics(gen_featureset(loud))).score);
}

TEST(GenFeatureset, ClassMeansNearPlanted) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthSpec spec;
    spec.seed = seed;
    spec.samples_per_class = 400;
    spec.noise_sigma = 1.5;
    const ClassStats st = class_statistics(gen_featureset(spec));
    const double bound = 4.0 * spec.noise_sigma / std::sqrt(400.0);
    EXPECT_LE((st.class_means - planted_means(spec)).cwiseAbs().maxCoeff(), bound);
  }
}

TEST(GenFeatureset, Validation) {
  SynthSpec spec;
  spec.k_count = 5;
  spec.dim = 3;
  try {
    gen_featureset(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
  spec.dim = 4;
  EXPECT_NO_THROW(gen_featureset(spec));
  spec.k_count = 1;
  EXPECT_THROW(gen_featureset(spec), Error);
  spec.k_count = 4;
  spec.noise_sigma = -1.0;
  EXPECT_THROW(gen_featureset(spec), Error);
}

// The softmax includes each class's own coefficient of 1. Moving one mean
// toward a neighbour raises that pair's coefficient, which flattens those
// rows, so the skewed set scores higher. Dropping the self term restores
// the reading where an even layout is fairest.
TEST(GenFeatureset, SkewEffectOnFairness) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthSpec even, skewed;
    even.seed = skewed.seed = seed;
    skewed.fairness_skew = 0.9;
    EXPECT_GT(fairness_of(skewed), fairness_of(even)) << "seed " << seed;
    EXPECT_GT(fairness_of(even, true), fairness_of(skewed, true)) << "seed " << seed;
  }
}

TEST(PlantedLevels, MonotoneEndpoints) {
  const auto levels = planted_levels(8);
  ASSERT_EQ(levels.size(), 8u);
  EXPECT_EQ(levels.front().separation, 1.0);
  EXPECT_EQ(levels.back().separation, 4.0);
  EXPECT_EQ(levels.front().noise_sigma, 2.0);
  EXPECT_EQ(levels.back().noise_sigma, 1.0);
  EXPECT_EQ(levels.front().fairness_skew, 0.9);
  EXPECT_EQ(levels.back().fairness_skew, 0.0);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    EXPECT_GT(levels[i].separation, levels[i - 1].separation);
    EXPECT_LT(levels[i].noise_sigma, levels[i - 1].noise_sigma);
    EXPECT_LT(levels[i].fairness_skew, levels[i - 1].fairness_skew);
  }
  EXPECT_THROW(planted_levels(1), Error);
}

TEST(GenZoo, WritesFilesAndAccuracyProxy) {
  TempDir a("zoo"), b("zoo");
  SynthSpec base;
  base.seed = 9;
  const auto levels = planted_levels(4);
  const ZooManifest m = gen_zoo(base, levels, a.path());
  gen_zoo(base, levels, b.path());
  ASSERT_EQ(m.entries.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(*m.entries[i].accuracy, i / 3.0);
    const std::string name = m.entries[i].feature_path.filename().string();
    EXPECT_EQ(slurp(a / name), slurp(b / name));
  }
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  const ZooManifest loaded = load_manifest(a / "manifest.json");
  EXPECT_EQ(loaded.entries.size(), 4u);
  const FeatureSet fs = load_features(loaded.entries[2].feature_path);
  EXPECT_EQ(fs.n(), 400);
}

TEST(GenZoo, IdenticalLevelsTriggerTieRule) {
  TempDir dir("zoo");
  const QualityLevel level{2.0, 1.0, 0.0};
  const ZooManifest m = gen_zoo(SynthSpec{}, {level, level}, dir.path());
  std::vector<RawScore> raw;
  for (const auto& e : m.entries) {
    const ClassStats st = class_statistics(load_features(e.feature_path));
    raw.push_back({e.model_id, variance_collapse(st).score,
                   class_fairness(overlap_matrix(st, CovMode::diagonal))});
  }
  EXPECT_EQ(*raw[0].c, *raw[1].c);
  for (const auto& r : fuse_scores(raw)) {
    EXPECT_EQ(*r.norm_c, 0.5);
    EXPECT_EQ(*r.norm_f, 0.5);
  }
}

}  // namespace
}  // namespace facerank
