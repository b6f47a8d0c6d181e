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
#include <cstdio>
#include <numbers>

#include "facerank/error.hpp"

namespace facerank {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() { return splitmix64_mix(seed_ + (++counter_) * kGamma); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const SynthSpec& spec) {
  if (spec.k_count < 2) throw Error(ErrorKind::range, "synth: k_count must be >= 2");
  if (spec.samples_per_class < 2) throw Error(ErrorKind::range, "synth: samples_per_class must be >= 2");
  if (spec.dim < 1) throw Error(ErrorKind::range, "synth: dim must be >= 1");
  if (spec.dim < spec.k_count - 1) {
    throw Error(ErrorKind::shape, "synth: a " + std::to_string(spec.k_count) +
                                      "-class simplex needs dim >= " +
                                      std::to_string(spec.k_count - 1));
  }
  if (!(spec.separation > 0) || !std::isfinite(spec.separation)) {
    throw Error(ErrorKind::range, "synth: separation must be positive");
  }
  if (!(spec.noise_sigma >= 0) || !std::isfinite(spec.noise_sigma)) {
    throw Error(ErrorKind::range, "synth: noise_sigma must be >= 0");
  }
  if (!(spec.fairness_skew >= 0 && spec.fairness_skew <= 1)) {
    throw Error(ErrorKind::range, "synth: fairness_skew must lie in [0, 1]");
  }
}

Matrix planted_means(const SynthSpec& spec) {
  validate(spec);
  const int k_count = spec.k_count;
  Matrix means = Matrix::Zero(k_count, spec.dim);
  // Helmert basis of the sum-zero subspace: column j-1 is
  // (1, ..., 1, -j, 0, ...) / sqrt(j (j + 1)) with j leading ones.
  // Its rows are simplex vertices at pairwise distance sqrt(2).
  for (int j = 1; j < k_count; ++j) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    for (int k = 0; k < j; ++k) means(k, j - 1) = scale;
    means(j, j - 1) = -static_cast<double>(j) * scale;
  }
  means *= spec.separation / std::numbers::sqrt2;
  const double skew = spec.fairness_skew;
  means.row(k_count - 1) = (1.0 - skew) * means.row(k_count - 1) + skew * means.row(k_count - 2);
  return means;
}

FeatureSet gen_featureset(const SynthSpec& spec) {
  const Matrix means = planted_means(spec);
  const Eigen::Index n = static_cast<Eigen::Index>(spec.k_count) * spec.samples_per_class;
  FeatureSet fs;
  fs.model_id = "synthetic";
  fs.k_count = spec.k_count;
  fs.features.resize(n, spec.dim);
  fs.labels.resize(n);
  fs.label_values.resize(spec.k_count);
  for (int k = 0; k < spec.k_count; ++k) fs.label_values[k] = k;

  CounterRng rng(spec.seed);
  Eigen::Index row = 0;
  for (int k = 0; k < spec.k_count; ++k) {
    for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (int j = 0; j < spec.dim; ++j) {
        fs.features(row, j) = means(k, j) + spec.noise_sigma * rng.normal();
      }
      fs.labels[row] = k;
    }
  }
  return fs;
}

std::vector<QualityLevel> planted_levels(int count) {
  if (count < 2) throw Error(ErrorKind::range, "synth: need at least two quality levels");
  std::vector<QualityLevel> out;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    out.push_back({1.0 + 3.0 * t, 2.0 - 1.0 * t, 0.9 * (1.0 - t)});
  }
  return out;
}

ZooManifest gen_zoo(const SynthSpec& base, const std::vector<QualityLevel>& levels,
                    const std::filesystem::path& out_dir) {
  if (levels.size() < 2) throw Error(ErrorKind::range, "synth: need at least two quality levels");
  std::filesystem::create_directories(out_dir);

  ZooManifest manifest;
  manifest.target_name = "synthetic";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    SynthSpec spec = base;
    spec.separation = levels[i].separation;
    spec.noise_sigma = levels[i].noise_sigma;
    spec.fairness_skew = levels[i].fairness_skew;

    char name[32];
    std::snprintf(name, sizeof name, "level_%02zu", i);
    FeatureSet fs = gen_featureset(spec);
    fs.model_id = name;
    const auto path = out_dir / (std::string(name) + ".feat");
    write_features(path, fs, FeatDtype::f32);

    ZooEntry entry;
    entry.model_id = name;
    entry.feature_path = path;
    entry.accuracy = static_cast<double>(i) / static_cast<double>(levels.size() - 1);
    manifest.entries.push_back(std::move(entry));
  }
  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace facerank
