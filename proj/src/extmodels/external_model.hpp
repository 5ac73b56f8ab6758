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
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evalkit/evaluate.hpp"
#include "evalkit/scorer.hpp"
#include "extmodels/isolation_forest.hpp"
#include "flowdata/scaler.hpp"
#include "ganomaly/synthetic.hpp"
#include "netcore/dense_net.hpp"

namespace ddoslab::extmodels {

enum class ExternalKind { isolation_forest, mlp_classifier };

const char* to_string(ExternalKind kind);
ExternalKind external_kind_from_string(const std::string& name);

// Synthetic benign flows plus the audit that came with them.
struct SyntheticBundle {
  flowdata::FlowTable table;
  ganomaly::AuditReport audit;
  std::string generator_fingerprint;

  // Directory layout: synthetic.csv, audit.json, bundle.json.
  void save(const std::filesystem::path& dir) const;
  static SyntheticBundle load(const std::filesystem::path& dir);
};

struct MlpOptions {
  std::vector<std::size_t> hidden = {32, 16};  // encoder widths; the last is the code size
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
};

struct PretrainConfig {
  std::uint64_t seed = 0;
  double max_violation_ratio = 0.10;
  double q = 0.95;
  ForestOptions forest;
  MlpOptions mlp;

  Json to_json() const;
  static PretrainConfig from_json(const Json& j);
};

struct FineTuneConfig {
  std::uint64_t seed = 0;
  std::size_t epochs = 30;  // MLP passes over the local data
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double q = 0.95;          // forest threshold quantile on local benign scores
  ForestOptions forest;     // trees appended to a forest

  Json to_json() const;
  static FineTuneConfig from_json(const Json& j);
};

struct FineTuneEntry {
  std::size_t batch_size = 0;
  std::size_t batches = 0;
  std::string metric;  // "bce" for the MLP, "benign_score_q" for forests
  double value = 0.0;
};

// A model meant to be handed to an outside party. Scores processed flows in
// feature units; its scaler was fitted on the synthetic bundle.
class ExternalModel : public evalkit::Scorer {
 public:
  ExternalKind kind() const { return kind_; }
  const std::vector<std::string>& columns() const override { return scaler_.columns; }
  std::vector<double> score(const flowdata::FlowTable& table) const override;

  double threshold() const { return threshold_; }
  bool fine_tuned() const { return !fine_tune_log_.empty(); }
  const std::vector<FineTuneEntry>& fine_tune_log() const { return fine_tune_log_; }
  const std::string& pretrain_fingerprint() const { return pretrain_fingerprint_; }
  const flowdata::ScalerParams& scaler() const { return scaler_; }
  const IsolationForest& forest() const { return forest_; }

  // Single-file container: magic, version, JSON manifest, parameter blob.
  std::vector<std::uint8_t> encode() const;
  static ExternalModel decode(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static ExternalModel load(const std::filesystem::path& path);
  std::string fingerprint() const;

 private:
  friend ExternalModel pretrain(ExternalKind, const SyntheticBundle&, const PretrainConfig&);
  friend ExternalModel fine_tune(const ExternalModel&, const flowdata::FlowTable&, const FineTuneConfig&);

  Json manifest() const;
  Matrix scaled(const flowdata::FlowTable& table) const;
  std::vector<double> reconstruction_errors(const Matrix& x) const;

  ExternalKind kind_ = ExternalKind::isolation_forest;
  flowdata::ScalerParams scaler_;
  double threshold_ = 0.5;
  std::string pretrain_fingerprint_;
  std::uint64_t seed_ = 0;
  std::vector<FineTuneEntry> fine_tune_log_;
  IsolationForest forest_;
  netcore::DenseNet encoder_;
  netcore::DenseNet decoder_;
  std::optional<netcore::DenseNet> head_;
  double error_min_ = 0.0;  // reconstruction-error normalisation before a head exists
  double error_max_ = 0.0;
};

// Fits on the synthetic rows only. Refuses bundles whose audit violation ratio
// exceeds config.max_violation_ratio.
ExternalModel pretrain(ExternalKind kind, const SyntheticBundle& bundle, const PretrainConfig& config);

// Incremental update on labeled local data. The synthetic bundle is not an
// input. Zero epochs (MLP), zero trees (forest) or an empty table leave the
// model unchanged.
ExternalModel fine_tune(const ExternalModel& model, const flowdata::FlowTable& local, const FineTuneConfig& config);

// One report per foreign test set. All schema mismatches are reported in one
// error before anything is scored.
std::map<std::string, evalkit::EvalReport> evaluate_unseen(const ExternalModel& model, const std::string& model_id,
                                                           const std::map<std::string, flowdata::FlowTable>& tests);

}  // namespace ddoslab::extmodels
