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

#include "facerank/zoo_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "facerank/error.hpp"

namespace facerank {

using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::string& buf, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(buf[offset + i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

std::string read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::io, "read failed: " + path.string());
  return buf;
}

void write_binary(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

FeatureSet remap_labels(Matrix features, const std::vector<std::int64_t>& raw, std::string model_id) {
  FeatureSet fs;
  fs.model_id = std::move(model_id);
  fs.features = std::move(features);
  const std::set<std::int64_t> distinct(raw.begin(), raw.end());
  fs.label_values.assign(distinct.begin(), distinct.end());
  std::map<std::int64_t, std::int32_t> dense;
  for (std::size_t k = 0; k < fs.label_values.size(); ++k) {
    dense[fs.label_values[k]] = static_cast<std::int32_t>(k);
  }
  fs.labels.reserve(raw.size());
  for (auto y : raw) fs.labels.push_back(dense[y]);
  fs.k_count = static_cast<int>(fs.label_values.size());
  validate(fs);
  return fs;
}

}  // namespace

FeatPayload read_feat(const fs::path& path) {
  const std::string buf = read_binary(path);
  const std::string where = path.string();
  if (buf.size() < kFeatHeaderSize) {
    if (buf.size() >= 4 && std::memcmp(buf.data(), kFeatMagic, 4) != 0) {
      throw Error(ErrorKind::format, where + ": bad magic, expected \"FACE\"", 0);
    }
    throw Error(ErrorKind::truncated,
                where + ": header needs 24 bytes, file has " + std::to_string(buf.size()),
                buf.size());
  }
  if (std::memcmp(buf.data(), kFeatMagic, 4) != 0) {
    throw Error(ErrorKind::format, where + ": bad magic, expected \"FACE\"", 0);
  }
  const auto version = get_le<std::uint16_t>(buf, 4);
  if (version != kFeatVersion) {
    throw Error(ErrorKind::format, where + ": unsupported version " + std::to_string(version), 4);
  }
  const auto dtype_byte = static_cast<std::uint8_t>(buf[6]);
  if (dtype_byte > 1) {
    throw Error(ErrorKind::format, where + ": unknown dtype " + std::to_string(dtype_byte), 6);
  }
  FeatPayload out;
  out.dtype = static_cast<FeatDtype>(dtype_byte);
  const std::size_t width = out.dtype == FeatDtype::f32 ? 4 : 8;
  const auto n = get_le<std::uint64_t>(buf, 8);
  const auto d = get_le<std::uint64_t>(buf, 16);

  // Reject sizes whose byte count would overflow before comparing.
  const std::uint64_t limit = std::uint64_t{1} << 40;
  if (n > limit || d > limit || (d != 0 && n > limit / d)) {
    throw Error(ErrorKind::format, where + ": implausible shape", 8);
  }
  const std::uint64_t value_bytes = n * d * width;
  const std::uint64_t expected = kFeatHeaderSize + value_bytes + n * 4;
  if (buf.size() < expected) {
    throw Error(ErrorKind::truncated,
                where + ": payload needs " + std::to_string(expected) + " bytes, file has " +
                    std::to_string(buf.size()),
                buf.size());
  }
  if (buf.size() > expected) {
    throw Error(ErrorKind::format, where + ": " + std::to_string(buf.size() - expected) +
                                       " trailing bytes after labels",
                expected);
  }

  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::size_t off = kFeatHeaderSize;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < d; ++j, off += width) {
      const double v = out.dtype == FeatDtype::f32 ? static_cast<double>(get_le<float>(buf, off))
                                                   : get_le<double>(buf, off);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::data,
                    where + ": non-finite value at row " + std::to_string(i) + ", column " +
                        std::to_string(j),
                    off);
      }
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  out.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i, off += 4) out.labels[i] = get_le<std::uint32_t>(buf, off);
  return out;
}

void write_feat(const fs::path& path, const FeatPayload& payload) {
  const auto n = static_cast<std::uint64_t>(payload.values.rows());
  const auto d = static_cast<std::uint64_t>(payload.values.cols());
  if (payload.labels.size() != n) throw Error(ErrorKind::shape, "label count differs from rows");
  std::string out;
  const std::size_t width = payload.dtype == FeatDtype::f32 ? 4 : 8;
  out.reserve(kFeatHeaderSize + n * d * width + n * 4);
  out.append(kFeatMagic, 4);
  put_le<std::uint16_t>(out, kFeatVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(payload.dtype));
  put_le<std::uint8_t>(out, 0);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint64_t>(out, d);
  for (Eigen::Index i = 0; i < payload.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < payload.values.cols(); ++j) {
      if (payload.dtype == FeatDtype::f32) {
        put_le<float>(out, static_cast<float>(payload.values(i, j)));
      } else {
        put_le<double>(out, payload.values(i, j));
      }
    }
  }
  for (auto y : payload.labels) put_le<std::uint32_t>(out, y);
  write_binary(path, out);
}

FeatureSet load_features(const fs::path& path) {
  if (path.extension() == ".csv") return load_features_csv(path);
  FeatPayload payload = read_feat(path);
  std::vector<std::int64_t> raw(payload.labels.begin(), payload.labels.end());
  return remap_labels(std::move(payload.values), raw, path.stem().string());
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record; double quotes protect commas and are doubled to escape.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

FeatureSet load_features_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::format, where + ": empty CSV");
  std::vector<std::string> header = split_csv(line);
  for (auto& h : header) h = trim(h);
  if (header.empty() || header.back() != "label") {
    throw Error(ErrorKind::format, where + ": last CSV column must be 'label'");
  }
  const std::size_t d = header.size() - 1;
  if (d == 0) throw Error(ErrorKind::format, where + ": no feature columns");

  std::vector<double> values;
  std::vector<std::int64_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::format, where + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " fields, got " +
                                         std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      const std::string cell = trim(cells[j]);
      if (!parse_number(cell, v)) {
        throw Error(ErrorKind::data, where + ":" + std::to_string(line_no) + ": bad number '" +
                                         cell + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::data, where + ":" + std::to_string(line_no) + ": non-finite value");
      }
      values.push_back(v);
    }
    std::int64_t y = 0;
    const std::string cell = trim(cells[d]);
    if (!parse_number(cell, y)) {
      throw Error(ErrorKind::data, where + ":" + std::to_string(line_no) + ": bad label '" +
                                       cell + "'");
    }
    labels.push_back(y);
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(values.data(), n,
                                                                     static_cast<Eigen::Index>(d));
  return remap_labels(std::move(features), labels, path.stem().string());
}

void write_features(const fs::path& path, const FeatureSet& fs, FeatDtype dtype) {
  FeatPayload payload;
  payload.dtype = dtype;
  payload.values = fs.features;
  payload.labels.reserve(fs.labels.size());
  for (auto y : fs.labels) {
    const std::int64_t original =
        fs.label_values.empty() ? y : fs.label_values.at(static_cast<std::size_t>(y));
    if (original < 0 || original > 0xFFFFFFFFll) {
      throw Error(ErrorKind::range, "label id " + std::to_string(original) + " does not fit u32");
    }
    payload.labels.push_back(static_cast<std::uint32_t>(original));
  }
  write_feat(path, payload);
}

SourcePredictions load_predictions(const fs::path& path) {
  FeatPayload payload = read_feat(path);
  SourcePredictions preds{std::move(payload.values)};
  validate(preds, payload.dtype == FeatDtype::f32 ? 1e-5 : 1e-6);
  return preds;
}

void write_predictions(const fs::path& path, const SourcePredictions& preds, FeatDtype dtype) {
  FeatPayload payload;
  payload.dtype = dtype;
  payload.values = preds.probs;
  payload.labels.assign(static_cast<std::size_t>(preds.n()), 0);
  write_feat(path, payload);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::manifest, "manifest: " + what);
}

double positive(const ordered_json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(std::string("config.") + key + " must be a number");
  const double v = j[key].get<double>();
  if (!(v > 0) || !std::isfinite(v)) {
    throw Error(ErrorKind::range, std::string("manifest: config.") + key + " must be positive");
  }
  return v;
}

}  // namespace

ZooManifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("top level must be an object");

  ZooManifest m;
  if (doc.contains("target_name")) {
    if (!doc["target_name"].is_string()) schema_error("target_name must be a string");
    m.target_name = doc["target_name"].get<std::string>();
  }
  if (doc.contains("config")) {
    const auto& cfg = doc["config"];
    if (!cfg.is_object()) schema_error("config must be an object");
    if (cfg.contains("cov_mode")) {
      if (!cfg["cov_mode"].is_string()) schema_error("config.cov_mode must be a string");
      m.config.cov_mode = parse_cov_mode(cfg["cov_mode"].get<std::string>());
    }
    m.config.fairness.temperature = positive(cfg, "temperature", m.config.fairness.temperature);
    m.config.numeric.pinv_rel_tol = positive(cfg, "pinv_rel_tol", m.config.numeric.pinv_rel_tol);
    m.config.numeric.logdet_floor = positive(cfg, "logdet_floor", m.config.numeric.logdet_floor);
    if (cfg.contains("exclude_self")) {
      if (!cfg["exclude_self"].is_boolean()) schema_error("config.exclude_self must be a boolean");
      m.config.fairness.exclude_self = cfg["exclude_self"].get<bool>();
    }
  }

  if (!doc.contains("entries") || !doc["entries"].is_array()) schema_error("entries must be an array");
  if (doc["entries"].empty()) schema_error("entries must not be empty");

  std::set<std::string> seen;
  for (const auto& e : doc["entries"]) {
    if (!e.is_object()) schema_error("each entry must be an object");
    if (!e.contains("model_id") || !e["model_id"].is_string()) schema_error("entry.model_id must be a string");
    if (!e.contains("feature_path") || !e["feature_path"].is_string()) {
      schema_error("entry.feature_path must be a string");
    }
    ZooEntry entry;
    entry.model_id = e["model_id"].get<std::string>();
    if (entry.model_id.empty()) schema_error("entry.model_id must not be empty");
    if (!seen.insert(entry.model_id).second) {
      throw Error(ErrorKind::duplicate_id, "manifest: duplicate model_id '" + entry.model_id + "'");
    }
    entry.feature_path = resolve(base_dir, e["feature_path"].get<std::string>());
    if (!fs::exists(entry.feature_path)) {
      throw Error(ErrorKind::missing_file, "manifest: feature file not found: " +
                                               entry.feature_path.string());
    }
    if (e.contains("prediction_path") && !e["prediction_path"].is_null()) {
      if (!e["prediction_path"].is_string()) schema_error("entry.prediction_path must be a string");
      entry.prediction_path = resolve(base_dir, e["prediction_path"].get<std::string>());
      if (!fs::exists(*entry.prediction_path)) {
        throw Error(ErrorKind::missing_file, "manifest: prediction file not found: " +
                                                 entry.prediction_path->string());
      }
    }
    if (e.contains("accuracy") && !e["accuracy"].is_null()) {
      if (!e["accuracy"].is_number()) schema_error("entry.accuracy must be a number");
      const double acc = e["accuracy"].get<double>();
      if (!(acc >= 0.0 && acc <= 1.0)) {
        throw Error(ErrorKind::range, "manifest: accuracy " + std::to_string(acc) + " of '" +
                                          entry.model_id + "' outside [0, 1]");
      }
      entry.accuracy = acc;
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

ZooManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::missing_file, "manifest not found: " + path.string());
  return parse_manifest(read_text_file(path), path.parent_path());
}

namespace {

ordered_json config_json(const ZooConfig& cfg) {
  ordered_json j;
  j["cov_mode"] = to_string(cfg.cov_mode);
  j["temperature"] = cfg.fairness.temperature;
  j["exclude_self"] = cfg.fairness.exclude_self;
  j["pinv_rel_tol"] = cfg.numeric.pinv_rel_tol;
  j["logdet_floor"] = cfg.numeric.logdet_floor;
  return j;
}

}  // namespace

void write_manifest(const fs::path& path, const ZooManifest& manifest) {
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  auto rel = [&](const fs::path& p) {
    std::error_code ec;
    const auto r = fs::relative(p, base, ec);
    return (ec || r.empty()) ? p.generic_string() : r.generic_string();
  };
  ordered_json doc;
  doc["target_name"] = manifest.target_name;
  doc["config"] = config_json(manifest.config);
  doc["entries"] = ordered_json::array();
  for (const auto& e : manifest.entries) {
    ordered_json j;
    j["model_id"] = e.model_id;
    j["feature_path"] = rel(e.feature_path);
    if (e.prediction_path) j["prediction_path"] = rel(*e.prediction_path);
    if (e.accuracy) j["accuracy"] = *e.accuracy;
    doc["entries"].push_back(std::move(j));
  }
  write_text_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw Error(ErrorKind::range, "unknown report format '" + text + "' (expected json|csv)");
}

namespace {

const std::vector<std::string>& baseline_columns() {
  static const std::vector<std::string> cols{"leep", "nce", "logme", "hscore", "gbc", "etf"};
  return cols;
}

std::optional<double> sort_key(const ScoreReport& r) {
  if (r.error) return std::nullopt;
  if (r.face) return r.face;
  if (r.norm_c || r.norm_f) return r.norm_c.value_or(0.0) + r.norm_f.value_or(0.0);
  return std::nullopt;
}

std::vector<const ScoreReport*> ranked(const std::vector<ScoreReport>& reports) {
  std::vector<const ScoreReport*> out;
  for (const auto& r : reports) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const ScoreReport* a, const ScoreReport* b) {
    const auto ka = sort_key(*a);
    const auto kb = sort_key(*b);
    if (a->error.has_value() != b->error.has_value()) return !a->error.has_value();
    if (ka.has_value() != kb.has_value()) return ka.has_value();
    if (ka && kb && *ka != *kb) return *ka > *kb;
    return a->model_id < b->model_id;
  });
  return out;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

const char* kWeighting =
    "hyperbolic additive: w_ij = 1/(1+r_i) + 1/(1+r_j), r = zero-based descending accuracy rank";

ordered_json correlation_json(const CorrelationReport& c) {
  ordered_json j;
  j["primary_metric"] = c.primary_metric;
  j["tau_w"] = c.tau_w;
  j["pearson"] = c.pearson ? ordered_json(*c.pearson) : ordered_json(nullptr);
  j["model_count"] = c.model_count;
  j["excluded_models"] = c.excluded_models;
  j["weighting"] = kWeighting;
  ordered_json per = ordered_json::object();
  for (const auto& [name, mc] : c.per_metric) {
    per[name]["tau_w"] = mc.tau_w;
    per[name]["pearson"] = mc.pearson ? ordered_json(*mc.pearson) : ordered_json(nullptr);
  }
  j["metrics"] = std::move(per);
  return j;
}

}  // namespace

std::string emit_report(const std::vector<ScoreReport>& reports,
                        const std::optional<CorrelationReport>& corr, ReportFormat format,
                        const ReportContext& ctx) {
  const auto order = ranked(reports);

  if (format == ReportFormat::json) {
    ordered_json doc;
    doc["target_name"] = ctx.target_name;
    ordered_json cfg = config_json(ctx.config);
    cfg["metrics"] = ctx.metrics;
    doc["config"] = std::move(cfg);
    doc["models"] = ordered_json::array();
    int rank = 0;
    for (const auto* r : order) {
      ordered_json j;
      j["model_id"] = r->model_id;
      if (r->error) {
        j["error"] = *r->error;
        doc["models"].push_back(std::move(j));
        continue;
      }
      j["rank"] = ++rank;
      auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
      };
      put("face", r->face);
      put("raw_c", r->raw_c);
      put("raw_f", r->raw_f);
      put("norm_c", r->norm_c);
      put("norm_f", r->norm_f);
      if (!r->baselines.empty()) {
        ordered_json b = ordered_json::object();
        for (const auto& [name, v] : r->baselines) b[name] = v;
        j["baselines"] = std::move(b);
      }
      if (!r->flags.empty()) j["flags"] = r->flags;
      doc["models"].push_back(std::move(j));
    }
    if (corr) doc["correlation"] = correlation_json(*corr);
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  std::vector<std::string> header{"rank", "model_id", "face", "raw_c", "raw_f", "norm_c", "norm_f"};
  for (const auto& b : baseline_columns()) header.push_back(b);
  header.push_back("flags");
  header.push_back("error");
  out << join(header, ',') << "\n";
  int rank = 0;
  for (const auto* r : order) {
    std::vector<std::string> row;
    row.push_back(r->error ? "" : std::to_string(++rank));
    row.push_back(csv_cell(r->model_id));
    for (const auto& v : {r->face, r->raw_c, r->raw_f, r->norm_c, r->norm_f}) {
      row.push_back(v ? fmt6(*v) : "");
    }
    for (const auto& b : baseline_columns()) {
      const auto it = r->baselines.find(b);
      row.push_back(it == r->baselines.end() ? "" : fmt6(it->second));
    }
    row.push_back(csv_cell(join(r->flags, ';')));
    row.push_back(r->error ? csv_cell(*r->error) : "");
    out << join(row, ',') << "\n";
  }
  if (corr) {
    out << "\nmetric,tau_w,pearson\n";
    for (const auto& [name, mc] : corr->per_metric) {
      out << csv_cell(name) << "," << fmt6(mc.tau_w) << ","
          << (mc.pearson ? fmt6(*mc.pearson) : "") << "\n";
    }
  }
  return out.str();
}

namespace {

ScoreReport parse_json_model(const ordered_json& m);

std::vector<ScoreReport> parse_json_report(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::format, std::string("score report: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array()) {
    throw Error(ErrorKind::format, "score report: missing 'models' array");
  }
  std::vector<ScoreReport> out;
  try {
    for (const auto& m : doc["models"]) {
      out.push_back(parse_json_model(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("score report: malformed model entry: ") + e.what());
  }
  return out;
}

ScoreReport parse_json_model(const ordered_json& m) {
  ScoreReport r;
  r.model_id = m.at("model_id").get<std::string>();
  if (m.contains("error")) r.error = m["error"].get<std::string>();
  auto get = [&](const char* key, std::optional<double>& dst) {
    if (m.contains(key) && m[key].is_number()) dst = m[key].get<double>();
  };
  get("face", r.face);
  get("raw_c", r.raw_c);
  get("raw_f", r.raw_f);
  get("norm_c", r.norm_c);
  get("norm_f", r.norm_f);
  if (m.contains("baselines")) {
    for (const auto& [k, v] : m["baselines"].items()) r.baselines[k] = v.get<double>();
  }
  if (m.contains("flags")) r.flags = m["flags"].get<std::vector<std::string>>();
  return r;
}

std::vector<ScoreReport> parse_csv_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::format, "score report: empty CSV");
  auto header = split_csv(line);
  for (auto& h : header) h = trim(h);
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  if (!col("model_id")) throw Error(ErrorKind::format, "score report: no model_id column");

  std::vector<ScoreReport> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) break;  // correlation block follows a blank line
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error(ErrorKind::format, "score report: ragged CSV row");
    auto cell = [&](const std::string& name) -> std::string {
      const auto c = col(name);
      return c ? trim(cells[*c]) : std::string();
    };
    auto num = [&](const std::string& name) -> std::optional<double> {
      const std::string s = cell(name);
      double v = 0.0;
      if (s.empty()) return std::nullopt;
      if (!parse_number(s, v)) throw Error(ErrorKind::data, "score report: bad number '" + s + "'");
      return v;
    };
    ScoreReport r;
    r.model_id = cell("model_id");
    if (const auto e = cell("error"); !e.empty()) r.error = e;
    r.face = num("face");
    r.raw_c = num("raw_c");
    r.raw_f = num("raw_f");
    r.norm_c = num("norm_c");
    r.norm_f = num("norm_f");
    for (const auto& b : baseline_columns()) {
      if (const auto v = num(b)) r.baselines[b] = *v;
    }
    if (const auto f = cell("flags"); !f.empty()) {
      std::string part;
      std::istringstream fs(f);
      while (std::getline(fs, part, ';')) r.flags.push_back(part);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ScoreReport> parse_score_report(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_report(text);
  return parse_csv_report(text);
}

std::string read_text_file(const fs::path& path) { return read_binary(path); }

void write_text_file(const fs::path& path, const std::string& text) { write_binary(path, text); }

}  // namespace facerank
