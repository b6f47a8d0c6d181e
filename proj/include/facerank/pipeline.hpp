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

// End-to-end zoo ranking: load -> class statistics -> metrics -> fusion.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "facerank/correlation.hpp"
#include "facerank/face.hpp"
#include "facerank/zoo_io.hpp"

namespace facerank {

enum class Metric { face, vc, cf, leep, nce, logme, hscore, gbc, etf };

const char* to_string(Metric m);
// Comma-separated list, e.g. "face,gbc". Throws Error{range} on unknown names.
std::set<Metric> parse_metrics(const std::string& text);
std::set<Metric> all_metrics();

enum class Command { score, eval, gen };

struct RunConfig {
  Command command = Command::score;
  std::filesystem::path manifest_path;
  std::optional<std::filesystem::path> output_path;  // stdout when absent
  ReportFormat format = ReportFormat::json;
  std::set<Metric> metrics = all_metrics();
  std::optional<int> jobs;
  std::optional<CovMode> cov_mode;
  std::optional<double> temperature;

  // eval
  std::filesystem::path scores_path;

  // gen
  int levels = 8;
  int k_count = 4;
  int dim = 8;
  int samples_per_class = 100;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

// Fills jobs / temperature from FACE_RANK_JOBS / FACE_RANK_TEMPERATURE when
// the command line left them unset.
void apply_environment(RunConfig& cfg);

struct ScoreRun {
  std::vector<ScoreReport> reports;  // manifest order
  ReportContext context;
  int failed_entries = 0;
};

// Scores every manifest entry on `jobs` workers. Entry failures are captured
// in ScoreReport::error; fusion runs over the entries that succeeded.
ScoreRun score_zoo(const ZooManifest& manifest, const std::set<Metric>& metrics, int jobs = 1);

// Correlates every metric present in `reports` with the manifest accuracies.
// Throws Error{evaluation} with fewer than two usable models and
// Error{degenerate} when all accuracies are equal.
CorrelationReport evaluate(const std::vector<ScoreReport>& reports, const ZooManifest& manifest);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

// Command drivers used by the face-rank binary; they return the exit code.
int run_score(const RunConfig& cfg);
int run_eval(const RunConfig& cfg);
int run_gen(const RunConfig& cfg);

}  // namespace facerank
