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

// File formats: FEAT binary features/predictions, CSV fixtures, the JSON
// zoo manifest, and score/correlation reports.
//
// FEAT layout (little-endian):
//   offset  0  char[4]  magic "FACE"
//   offset  4  u16      version (1)
//   offset  6  u8       dtype (0 = f32, 1 = f64)
//   offset  7  u8       reserved (0)
//   offset  8  u64      n
//   offset 16  u64      d
//   offset 24  n*d values, row-major
//   then       n labels, u32

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "facerank/baselines.hpp"
#include "facerank/correlation.hpp"
#include "facerank/face.hpp"
#include "facerank/linalg.hpp"

namespace facerank {

namespace fs = std::filesystem;

enum class FeatDtype : std::uint8_t { f32 = 0, f64 = 1 };

inline constexpr char kFeatMagic[4] = {'F', 'A', 'C', 'E'};
inline constexpr std::uint16_t kFeatVersion = 1;
inline constexpr std::size_t kFeatHeaderSize = 24;

// Raw contents of a FEAT file before any interpretation of the labels.
struct FeatPayload {
  FeatDtype dtype = FeatDtype::f32;
  Matrix values;
  std::vector<std::uint32_t> labels;
};

FeatPayload read_feat(const fs::path& path);
void write_feat(const fs::path& path, const FeatPayload& payload);

// Loads FEAT (any extension except .csv) or CSV features. Labels are
// remapped to [0, K) in ascending order of the original ids.
FeatureSet load_features(const fs::path& path);
FeatureSet load_features_csv(const fs::path& path);

// Writes the original label ids (fs.label_values) so a reload reproduces fs.
void write_features(const fs::path& path, const FeatureSet& fs, FeatDtype dtype = FeatDtype::f32);

// Row-stochastic check uses 1e-5 for f32 payloads and 1e-6 for f64.
SourcePredictions load_predictions(const fs::path& path);
void write_predictions(const fs::path& path, const SourcePredictions& preds,
                       FeatDtype dtype = FeatDtype::f32);

struct ZooEntry {
  std::string model_id;
  fs::path feature_path;
  std::optional<fs::path> prediction_path;
  std::optional<double> accuracy;
};

struct ZooConfig {
  CovMode cov_mode = CovMode::diagonal;
  FairnessConfig fairness;
  NumericConfig numeric;
};

struct ZooManifest {
  std::string target_name;
  ZooConfig config;
  std::vector<ZooEntry> entries;
};

// Relative paths resolve against `base_dir`. Referenced files must exist.
ZooManifest parse_manifest(const std::string& json_text, const fs::path& base_dir);
ZooManifest load_manifest(const fs::path& path);
// Paths are written relative to the manifest's directory when possible.
void write_manifest(const fs::path& path, const ZooManifest& manifest);

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(const std::string& text);

struct ReportContext {
  std::string target_name;
  ZooConfig config;
  std::vector<std::string> metrics;
};

// Models are ordered by descending FaCe score (model_id breaks ties); rows
// that failed to score come last. CSV renders 6 significant digits, JSON
// round-trip precision.
std::string emit_report(const std::vector<ScoreReport>& reports,
                        const std::optional<CorrelationReport>& corr, ReportFormat format,
                        const ReportContext& ctx);

// Reads back a report written by emit_report (JSON or CSV).
std::vector<ScoreReport> parse_score_report(const std::string& text);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace facerank
