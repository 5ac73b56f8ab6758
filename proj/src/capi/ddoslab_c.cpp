// Copyright 2026 The ddoslab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "ddoslab/ddoslab.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/stats.hpp"
#include "evalkit/metrics.hpp"
#include "flowdata/csv.hpp"
#include "ganomaly/detector.hpp"
#include "pipeline/commands.hpp"

struct ddl_table {
  ddoslab::flowdata::FlowTable table;
};

struct ddl_detector {
  std::shared_ptr<ddoslab::ganomaly::GanomalyDetector> detector;
  double threshold = 0.0;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_fingerprint;

ddl_status status_for(ddoslab::ErrorKind kind) {
  using ddoslab::ErrorKind;
  switch (kind) {
    case ErrorKind::config:
      return DDL_CONFIG_ERROR;
    case ErrorKind::data:
    case ErrorKind::io:
    case ErrorKind::shape:
      return DDL_DATA_ERROR;
    default:
      return DDL_ERROR;
  }
}

template <typename F>
ddl_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return DDL_OK;
  } catch (const ddoslab::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return DDL_ERROR;
  }
}

ddl_status invalid(const char* what) {
  last_error = what;
  return DDL_INVALID_ARGUMENT;
}

std::vector<ddoslab::flowdata::Label> to_labels(const int* labels, size_t n) {
  std::vector<ddoslab::flowdata::Label> out(n);
  for (size_t i = 0; i < n; ++i) {
    ddoslab::require(labels[i] == 0 || labels[i] == 1, ddoslab::ErrorKind::precondition, "labels must be 0 or 1");
    out[i] = labels[i] == 1 ? ddoslab::flowdata::Label::ddos : ddoslab::flowdata::Label::benign;
  }
  return out;
}

}  // namespace

extern "C" {

const char* ddl_last_error(void) { return last_error.c_str(); }

const char* ddl_version(void) { return DDOSLAB_VERSION; }

ddl_status ddl_set_log_level(const char* level) {
  if (level == nullptr) return invalid("level is NULL");
  const auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && std::string(level) != "off") return invalid("unknown log level");
  spdlog::set_level(lvl);
  return DDL_OK;
}

ddl_status ddl_roc_auc(const double* scores, const int* labels, size_t n, double* out) {
  if ((n > 0 && (scores == nullptr || labels == nullptr)) || out == nullptr) return invalid("NULL argument");
  return guarded([&] {
    *out = ddoslab::evalkit::roc_auc(std::vector<double>(scores, scores + n), to_labels(labels, n));
  });
}

ddl_status ddl_f1(const int* predictions, const int* labels, size_t n, double* out) {
  if ((n > 0 && (predictions == nullptr || labels == nullptr)) || out == nullptr) return invalid("NULL argument");
  return guarded([&] { *out = ddoslab::evalkit::f1(to_labels(predictions, n), to_labels(labels, n)); });
}

ddl_status ddl_quantile(const double* values, size_t n, double q, double* out) {
  if ((n > 0 && values == nullptr) || out == nullptr) return invalid("NULL argument");
  return guarded([&] { *out = ddoslab::quantile(std::vector<double>(values, values + n), q); });
}

ddl_status ddl_table_read_csv(const char* path, ddl_table** out) {
  if (path == nullptr || out == nullptr) return invalid("NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new ddl_table{ddoslab::flowdata::read_table_csv(path)}; });
}

void ddl_table_free(ddl_table* table) { delete table; }

size_t ddl_table_rows(const ddl_table* table) { return table ? table->table.rows() : 0; }

size_t ddl_table_cols(const ddl_table* table) { return table ? table->table.cols() : 0; }

ddl_status ddl_table_labels(const ddl_table* table, int* out, size_t n) {
  if (table == nullptr || out == nullptr) return invalid("NULL argument");
  if (n < table->table.rows()) return invalid("output buffer too small");
  const auto& labels = table->table.labels();
  for (size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == ddoslab::flowdata::Label::ddos ? 1 : 0;
  return DDL_OK;
}

ddl_status ddl_detector_load(const char* model_dir, const char* silo, ddl_detector** out) {
  if (model_dir == nullptr || silo == nullptr || out == nullptr) return invalid("NULL argument");
  *out = nullptr;
  return guarded([&] {
    const std::filesystem::path dir(model_dir);
    const auto model = ddoslab::ganomaly::load_bundle(dir / "model");
    const auto cal_path = dir / "calibration" / (std::string(silo) + ".json");
    if (!std::filesystem::exists(cal_path)) {
      ddoslab::fail(ddoslab::ErrorKind::data, "no calibration for silo '" + std::string(silo) + "' in " + dir.string());
    }
    const auto cal = ddoslab::ganomaly::Calibration::from_json(ddoslab::read_json_file(cal_path));
    *out = new ddl_detector{ddoslab::ganomaly::make_detector(model, cal), cal.threshold.threshold};
  });
}

void ddl_detector_free(ddl_detector* detector) { delete detector; }

double ddl_detector_threshold(const ddl_detector* detector) { return detector ? detector->threshold : 0.0; }

ddl_status ddl_detector_score(const ddl_detector* detector, const ddl_table* table, double* scores, size_t n) {
  if (detector == nullptr || table == nullptr || scores == nullptr) return invalid("NULL argument");
  if (n < table->table.rows()) return invalid("output buffer too small");
  return guarded([&] {
    const auto s = detector->detector->score(table->table);
    std::copy(s.begin(), s.end(), scores);
  });
}

void ddl_cmd_options_init(ddl_cmd_options* options) {
  if (options != nullptr) *options = ddl_cmd_options{};
}

ddl_status ddl_cmd_run(const char* command, const ddl_cmd_options* options) {
  if (command == nullptr) return invalid("command is NULL");
  ddl_cmd_options defaults{};
  const ddl_cmd_options& o = options ? *options : defaults;
  return guarded([&] {
    ddoslab::pipeline::CommandOptions opts;
    if (o.config) opts.config = o.config;
    if (o.out) opts.out = o.out;
    if (o.has_seed) opts.seed = o.seed;
    if (o.bind) opts.bind = o.bind;
    if (o.server) opts.server = o.server;
    if (o.models) opts.models = o.models;
    if (o.datasets) opts.datasets = o.datasets;
    if (o.preset) opts.preset = o.preset;
    const auto manifest = ddoslab::pipeline::run_command(command, opts);
    last_fingerprint = manifest.output_fingerprint();
  });
}

const char* ddl_cmd_last_fingerprint(void) { return last_fingerprint.c_str(); }

}  // extern "C"
