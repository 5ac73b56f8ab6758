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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "evalkit/metrics.hpp"
#include "evalkit/scorer.hpp"

namespace ddoslab::evalkit {

struct ThresholdReport {
  double threshold = 0.0;
  double q = 0.95;
  std::size_t count = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;

  Json to_json() const;
  static ThresholdReport from_json(const Json& j);
};

// Threshold = linear-interpolation q-quantile of validation scores.
ThresholdReport threshold_from_scores(std::span<const double> validation_scores, double q);
ThresholdReport select_threshold(const Scorer& scorer, const flowdata::FlowTable& validation, double q);

struct EvalReport {
  std::string model_id;
  std::string dataset_id;
  std::string scaler_owner;  // silo whose scaler/threshold was applied
  std::optional<double> roc_auc;  // absent when the test set is single-class
  double f1 = 0.0;
  double threshold = 0.0;
  Confusion counts;
  std::vector<double> scores;  // per-row outputs, not serialised
  std::vector<Label> predictions;

  Json to_json() const;
  static EvalReport from_json(const Json& j);
};

EvalReport evaluate(const Scorer& scorer, const flowdata::FlowTable& test, double threshold,
                    const std::string& model_id, const std::string& dataset_id);

// One calibrated scoring pipeline owned by a silo ("home").
struct Detector {
  std::string home;
  std::shared_ptr<const Scorer> scorer;
  double threshold = 0.0;
  std::vector<double> validation_scores;
};

// A row of the matrix. A locally trained model has one detector; the
// federated model has one per participant and each dataset is scored by its
// own participant's detector when there is one.
struct ModelRow {
  std::string id;
  bool federated = false;
  std::vector<Detector> detectors;
};

struct CrossEvalMatrix {
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  std::map<std::string, std::map<std::string, EvalReport>> cells;  // model -> dataset -> report
  std::map<std::string, double> average_f1;
  std::map<std::string, double> average_auc;
  // model -> q -> average F1 with thresholds re-selected at q
  std::map<std::string, std::map<std::string, double>> sensitivity;

  const EvalReport& at(const std::string& model, const std::string& dataset) const;
  Json to_json() const;
  static CrossEvalMatrix from_json(const Json& j);
  std::string to_text() const;
};

CrossEvalMatrix cross_evaluate(const std::vector<ModelRow>& models,
                               const std::map<std::string, flowdata::FlowTable>& datasets,
                               const std::vector<double>& sensitivity_q = {0.90, 0.95, 0.99});

}  // namespace ddoslab::evalkit
