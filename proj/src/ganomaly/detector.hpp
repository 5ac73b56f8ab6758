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
#include <memory>
#include <optional>

#include "evalkit/evaluate.hpp"
#include "flowdata/scaler.hpp"
#include "ganomaly/model.hpp"

namespace ddoslab::ganomaly {

// A GANomaly model as used by one silo: that silo's scaler in front, the
// model's score normalisation behind.
class GanomalyDetector : public evalkit::Scorer {
 public:
  GanomalyDetector(GanomalyModel model, flowdata::ScalerParams scaler);

  std::vector<double> raw(const flowdata::FlowTable& table) const;
  std::vector<double> score(const flowdata::FlowTable& table) const override;
  const std::vector<std::string>& columns() const override { return scaler_.columns; }

  // Fits the score normalisation on validation scores.
  void fit_normalization(const flowdata::FlowTable& validation);

  const GanomalyModel& model() const { return model_; }
  const flowdata::ScalerParams& scaler() const { return scaler_; }

 private:
  GanomalyModel model_;
  flowdata::ScalerParams scaler_;
};

// Silo-private calibration of a model: scaler, normalisation and threshold.
struct Calibration {
  std::string model_fingerprint;
  flowdata::ScalerParams scaler;
  ScoreNorm score_norm;
  evalkit::ThresholdReport threshold;
  std::vector<double> validation_scores;

  Json to_json() const;
  static Calibration from_json(const Json& j);
};

// Fits normalisation and threshold on a silo's validation split.
Calibration calibrate(GanomalyDetector& detector, const flowdata::FlowTable& validation, double q);

// Rebuilds a ready-to-score detector from a bundle and a calibration.
std::shared_ptr<GanomalyDetector> make_detector(const GanomalyModel& model, const Calibration& calibration);

}  // namespace ddoslab::ganomaly
