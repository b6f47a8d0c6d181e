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

// Deterministic synthetic Gaussian zoos with planted quality ordering.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "facerank/linalg.hpp"
#include "facerank/zoo_io.hpp"

namespace facerank {

// Counter-based generator: the i-th draw (i = 1, 2, ...) is
// splitmix64_mix(seed + i * 0x9E3779B97F4A7C15), where the mix is
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
// Uniforms take the top 53 bits, offset by half an ulp into (0, 1).
// Normals use Box-Muller (cosine branch) on two consecutive uniforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct SynthSpec {
  int k_count = 4;
  int dim = 8;
  int samples_per_class = 100;
  double separation = 2.0;   // distance between any two simplex means
  double noise_sigma = 1.0;  // isotropic within-class std
  double fairness_skew = 0.0;  // 0: equidistant; 1: last mean on top of its neighbour
  std::uint64_t seed = 0;
};

void validate(const SynthSpec& spec);

// Planted class means: regular simplex vertices with pairwise distance
// `separation`, embedded in the first K-1 coordinates; the last class is
// moved toward class K-2 by `fairness_skew`.
Matrix planted_means(const SynthSpec& spec);

// Rows are grouped by class; identical specs give identical output.
FeatureSet gen_featureset(const SynthSpec& spec);

struct QualityLevel {
  double separation;
  double noise_sigma;
  double fairness_skew;
};

// `count` levels, worst first: separation 1 -> 4, noise 2 -> 1, skew 0.9 -> 0.
std::vector<QualityLevel> planted_levels(int count);

// Writes level_XX.feat per level and manifest.json into `out_dir`. Every
// level shares base.seed; the accuracy proxy of level i is i / (L - 1).
ZooManifest gen_zoo(const SynthSpec& base, const std::vector<QualityLevel>& levels,
                    const std::filesystem::path& out_dir);

}  // namespace facerank
