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

#include "facerank/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "facerank/baselines.hpp"
#include "facerank/error.hpp"
#include "facerank/synth.hpp"

namespace facerank {

namespace {

struct MetricName {
  Metric metric;
  const char* name;
};

constexpr MetricName kMetricNames[] = {
    {Metric::face, "face"}, {Metric::vc, "vc"},         {Metric::cf, "cf"},
    {Metric::leep, "leep"}, {Metric::nce, "nce"},       {Metric::logme, "logme"},
    {Metric::hscore, "hscore"}, {Metric::gbc, "gbc"},   {Metric::etf, "etf"},
};

}  // namespace

const char* to_string(Metric m) {
  for (const auto& mn : kMetricNames) {
    if (mn.metric == m) return mn.name;
  }
  return "unknown";
}

std::set<Metric> all_metrics() {
  std::set<Metric> out;
  for (const auto& mn : kMetricNames) out.insert(mn.metric);
  return out;
}

std::set<Metric> parse_metrics(const std::string& text) {
  std::set<Metric> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto it = std::find_if(std::begin(kMetricNames), std::end(kMetricNames),
                                 [&](const MetricName& mn) { return item == mn.name; });
    if (it == std::end(kMetricNames)) throw Error(ErrorKind::range, "unknown metric '" + item + "'");
    out.insert(it->metric);
  }
  if (out.empty()) throw Error(ErrorKind::range, "metric selection is empty");
  return out;
}

void apply_environment(RunConfig& cfg) {
  if (!cfg.jobs) {
    if (const char* env = std::getenv("FACE_RANK_JOBS"); env && *env) {
      try {
        cfg.jobs = std::stoi(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::range, std::string("FACE_RANK_JOBS is not an integer: ") + env);
      }
    }
  }
  if (!cfg.temperature) {
    if (const char* env = std::getenv("FACE_RANK_TEMPERATURE"); env && *env) {
      try {
        cfg.temperature = std::stod(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::range, std::string("FACE_RANK_TEMPERATURE is not a number: ") + env);
      }
    }
  }
}

namespace {

struct EntryResult {
  ScoreReport report;
  RawScore raw;
};

bool wants(const std::set<Metric>& metrics, std::initializer_list<Metric> any) {
  return std::any_of(any.begin(), any.end(), [&](Metric m) { return metrics.count(m) > 0; });
}

EntryResult score_entry(const ZooEntry& entry, const ZooConfig& cfg,
                        const std::set<Metric>& metrics) {
  EntryResult out;
  out.report.model_id = entry.model_id;
  out.raw.model_id = entry.model_id;
  auto& rep = out.report;
  try {
    FeatureSet fs = load_features(entry.feature_path);
    fs.model_id = entry.model_id;

    if (wants(metrics, {Metric::face, Metric::vc, Metric::cf, Metric::gbc, Metric::etf})) {
      const ClassStats stats = class_statistics(fs, cfg.cov_mode);
      if (wants(metrics, {Metric::face, Metric::vc})) {
        const auto vc = variance_collapse(stats, cfg.numeric);
        out.raw.c = vc.score;
        if (vc.means_collapsed) rep.flags.push_back("collapsed_class_means");
      }
      if (wants(metrics, {Metric::face, Metric::cf, Metric::gbc})) {
        const OverlapMatrix om = overlap_matrix(stats, cfg.cov_mode, cfg.numeric);
        if (wants(metrics, {Metric::face, Metric::cf})) {
          out.raw.f = class_fairness(om, cfg.fairness);
        }
        if (metrics.count(Metric::gbc)) rep.baselines["gbc"] = gbc(om);
      }
      if (metrics.count(Metric::etf)) {
        try {
          rep.baselines["etf"] = etf_distance(stats.class_means, stats.global_mean);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::degenerate) throw;
          rep.flags.push_back("etf_undefined");
        }
      }
    }
    if (metrics.count(Metric::hscore)) rep.baselines["hscore"] = hscore(fs, cfg.numeric.pinv_rel_tol);
    if (metrics.count(Metric::logme)) {
      const auto lm = logme(fs);
      rep.baselines["logme"] = lm.value;
      if (!lm.converged) rep.flags.push_back("logme_not_converged");
    }
    if (wants(metrics, {Metric::leep, Metric::nce})) {
      if (entry.prediction_path) {
        const SourcePredictions preds = load_predictions(*entry.prediction_path);
        if (preds.n() != fs.n()) {
          throw Error(ErrorKind::shape, "prediction rows (" + std::to_string(preds.n()) +
                                            ") differ from feature rows (" +
                                            std::to_string(fs.n()) + ")");
        }
        if (metrics.count(Metric::leep)) rep.baselines["leep"] = leep(preds, fs.labels);
        if (metrics.count(Metric::nce)) rep.baselines["nce"] = nce(hard_labels(preds), fs.labels);
      } else {
        rep.flags.push_back("no_source_predictions");
      }
    }
  } catch (const std::exception& e) {
    rep = ScoreReport{};
    rep.model_id = entry.model_id;
    rep.error = e.what();
    out.raw = RawScore{entry.model_id, std::nullopt, std::nullopt};
  }
  return out;
}

}  // namespace

ScoreRun score_zoo(const ZooManifest& manifest, const std::set<Metric>& metrics, int jobs) {
  const std::size_t count = manifest.entries.size();
  std::vector<EntryResult> results(count);

  const int workers = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      results[i] = score_entry(manifest.entries[i], manifest.config, metrics);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ScoreRun run;
  run.context.target_name = manifest.target_name;
  run.context.config = manifest.config;
  for (Metric m : metrics) run.context.metrics.push_back(to_string(m));

  std::vector<RawScore> raw;
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < count; ++i) {
    if (results[i].report.error) {
      ++run.failed_entries;
    } else {
      raw.push_back(results[i].raw);
      scored.push_back(i);
    }
  }
  if (!raw.empty()) {
    const auto fused = fuse_scores(raw);
    for (std::size_t s = 0; s < scored.size(); ++s) {
      auto& rep = results[scored[s]].report;
      rep.raw_c = fused[s].raw_c;
      rep.raw_f = fused[s].raw_f;
      rep.norm_c = fused[s].norm_c;
      rep.norm_f = fused[s].norm_f;
      rep.face = fused[s].face;
    }
  }
  for (auto& r : results) run.reports.push_back(std::move(r.report));
  return run;
}

namespace {

std::vector<std::pair<std::string, std::optional<double>>> metric_values(const ScoreReport& r) {
  std::vector<std::pair<std::string, std::optional<double>>> out{
      {"face", r.face}, {"vc", r.raw_c}, {"cf", r.raw_f}};
  for (const auto& [name, v] : r.baselines) out.emplace_back(name, v);
  return out;
}

}  // namespace

CorrelationReport evaluate(const std::vector<ScoreReport>& reports, const ZooManifest& manifest) {
  std::map<std::string, double> accuracy;
  for (const auto& e : manifest.entries) {
    if (e.accuracy) accuracy[e.model_id] = *e.accuracy;
  }

  CorrelationReport corr;
  std::vector<const ScoreReport*> usable;
  for (const auto& r : reports) {
    if (!r.error && accuracy.count(r.model_id)) {
      usable.push_back(&r);
    } else {
      ++corr.excluded_models;
    }
  }
  if (usable.size() < 2) {
    throw Error(ErrorKind::evaluation, "evaluation needs at least two scored models with accuracy, found " +
                                           std::to_string(usable.size()));
  }
  const double first_acc = accuracy[usable.front()->model_id];
  if (std::all_of(usable.begin(), usable.end(),
                  [&](const ScoreReport* r) { return accuracy[r->model_id] == first_acc; })) {
    throw Error(ErrorKind::degenerate, "all ground-truth accuracies are equal; correlation is undefined");
  }

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> columns;
  for (const auto* r : usable) {
    for (const auto& [name, v] : metric_values(*r)) {
      if (!v) continue;
      columns[name].first.push_back(*v);
      columns[name].second.push_back(accuracy[r->model_id]);
    }
  }
  for (const auto& [name, col] : columns) {
    if (col.first.size() < 2) continue;
    MetricCorrelation mc;
    mc.tau_w = weighted_kendall(col.first, col.second);
    try {
      mc.pearson = pearson(col.first, col.second);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate) throw;
    }
    corr.per_metric[name] = mc;
  }
  if (corr.per_metric.empty()) throw Error(ErrorKind::evaluation, "no metric has two or more scored models");

  for (const char* preferred : {"face", "vc", "cf"}) {
    if (corr.per_metric.count(preferred)) {
      corr.primary_metric = preferred;
      break;
    }
  }
  if (corr.primary_metric.empty()) corr.primary_metric = corr.per_metric.begin()->first;
  const auto& primary = corr.per_metric[corr.primary_metric];
  corr.tau_w = primary.tau_w;
  corr.pearson = primary.pearson;
  corr.model_count = static_cast<int>(columns[corr.primary_metric].first.size());
  return corr;
}

namespace {

void write_output(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (path) {
    write_text_file(*path, text);
  } else {
    std::cout << text;
  }
}

ZooManifest manifest_with_overrides(const RunConfig& cfg) {
  ZooManifest manifest = load_manifest(cfg.manifest_path);
  if (cfg.cov_mode) manifest.config.cov_mode = *cfg.cov_mode;
  if (cfg.temperature) {
    if (!(*cfg.temperature > 0)) throw Error(ErrorKind::range, "temperature must be positive");
    manifest.config.fairness.temperature = *cfg.temperature;
  }
  return manifest;
}

}  // namespace

int run_score(const RunConfig& cfg) {
  const ZooManifest manifest = manifest_with_overrides(cfg);
  const ScoreRun run = score_zoo(manifest, cfg.metrics, cfg.jobs.value_or(1));
  write_output(cfg.output_path, emit_report(run.reports, std::nullopt, cfg.format, run.context));
  for (const auto& r : run.reports) {
    if (r.error) std::cerr << "face-rank: " << r.model_id << ": " << *r.error << "\n";
  }
  if (run.failed_entries == 0) return kExitOk;
  return run.failed_entries < static_cast<int>(run.reports.size()) ? kExitPartial : kExitFatal;
}

int run_eval(const RunConfig& cfg) {
  const ZooManifest manifest = manifest_with_overrides(cfg);
  const auto reports = parse_score_report(read_text_file(cfg.scores_path));
  const CorrelationReport corr = evaluate(reports, manifest);
  ReportContext ctx;
  ctx.target_name = manifest.target_name;
  ctx.config = manifest.config;
  for (const auto& [name, _] : corr.per_metric) ctx.metrics.push_back(name);
  write_output(cfg.output_path, emit_report(reports, corr, cfg.format, ctx));
  return kExitOk;
}

int run_gen(const RunConfig& cfg) {
  SynthSpec base;
  base.k_count = cfg.k_count;
  base.dim = cfg.dim;
  base.samples_per_class = cfg.samples_per_class;
  base.seed = cfg.seed;
  const auto manifest = gen_zoo(base, planted_levels(cfg.levels), cfg.out_dir);
  std::cout << "wrote " << manifest.entries.size() << " feature files and "
            << (cfg.out_dir / "manifest.json").string() << "\n";
  return kExitOk;
}

}  // namespace facerank
