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

// face-rank: rank a model zoo by transferability from precomputed embeddings.

#include <iostream>

#include <CLI11.hpp>

#include "facerank/error.hpp"
#include "facerank/pipeline.hpp"

using facerank::Command;
using facerank::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Transferability ranking of pre-trained models from embeddings"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "json";
  std::string metrics;
  std::string cov_mode;
  std::string out;

  auto* score = app.add_subcommand("score", "Score every model in a zoo manifest");
  score->add_option("--manifest", cfg.manifest_path, "Zoo manifest (JSON)")->required();
  score->add_option("--out", out, "Report path (stdout when omitted)");
  score->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  score->add_option("--metrics", metrics,
                    "Comma-separated subset of face,vc,cf,leep,nce,logme,hscore,gbc,etf");
  score->add_option("--cov-mode", cov_mode, "Class covariance model")
      ->check(CLI::IsMember({"diagonal", "full"}));
  score->add_option("--temperature", cfg.temperature, "Class fairness softmax temperature");
  score->add_option("--jobs", cfg.jobs, "Worker threads");

  auto* eval = app.add_subcommand("eval", "Correlate a score report with fine-tuned accuracies");
  eval->add_option("--manifest", cfg.manifest_path, "Zoo manifest with accuracies")->required();
  eval->add_option("--scores", cfg.scores_path, "Report written by `score`")->required();
  eval->add_option("--out", out, "Output path (stdout when omitted)");
  eval->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* gen = app.add_subcommand("gen", "Write a synthetic zoo with planted quality order");
  gen->add_option("--levels", cfg.levels, "Number of quality levels")->check(CLI::Range(2, 1000));
  gen->add_option("--k", cfg.k_count, "Classes")->check(CLI::Range(2, 100000));
  gen->add_option("--dim", cfg.dim, "Feature dimension")->check(CLI::PositiveNumber);
  gen->add_option("--samples", cfg.samples_per_class, "Samples per class")->check(CLI::Range(2, 10000000));
  gen->add_option("--seed", cfg.seed, "Generator seed");
  gen->add_option("--out-dir", cfg.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!out.empty()) cfg.output_path = out;
    cfg.format = facerank::parse_report_format(format);
    if (!metrics.empty()) cfg.metrics = facerank::parse_metrics(metrics);
    if (!cov_mode.empty()) cfg.cov_mode = facerank::parse_cov_mode(cov_mode);
    facerank::apply_environment(cfg);

    if (app.got_subcommand(score)) return facerank::run_score(cfg);
    if (app.got_subcommand(eval)) return facerank::run_eval(cfg);
    return facerank::run_gen(cfg);
  } catch (const facerank::Error& e) {
    std::cerr << "face-rank: " << facerank::to_string(e.kind()) << " error: " << e.what() << "\n";
    return facerank::kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "face-rank: " << e.what() << "\n";
    return facerank::kExitFatal;
  }
}
