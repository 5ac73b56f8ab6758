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
#include "ganomaly/detector.hpp"

#include "common/error.hpp"
#include "ganomaly/scoring.hpp"

namespace ddoslab::ganomaly {

GanomalyDetector::GanomalyDetector(GanomalyModel model, flowdata::ScalerParams scaler)
    : model_(std::move(model)), scaler_(std::move(scaler)) {
  require(scaler_.columns.size() == model_.config.input_dim, ErrorKind::shape,
          "detector: scaler has " + std::to_string(scaler_.columns.size()) + " columns, model expects " +
              std::to_string(model_.config.input_dim));
}

std::vector<double> GanomalyDetector::raw(const flowdata::FlowTable& table) const {
  return raw_scores(model_, flowdata::apply_scaler(table, scaler_).features());
}

std::vector<double> GanomalyDetector::score(const flowdata::FlowTable& table) const {
  return normalize_all(model_, raw(table));
}

void GanomalyDetector::fit_normalization(const flowdata::FlowTable& validation) {
  const auto r = raw(validation);
  fit_score_norm(model_, r);
}

Json Calibration::to_json() const {
  return Json{{"model_fingerprint", model_fingerprint},
              {"scaler", scaler.to_json()},
              {"score_norm", {{"min", score_norm.min}, {"max", score_norm.max}}},
              {"threshold", threshold.to_json()},
              {"validation_scores", validation_scores}};
}

Calibration Calibration::from_json(const Json& j) {
  Calibration c;
  c.model_fingerprint = j.at("model_fingerprint").get<std::string>();
  c.scaler = flowdata::ScalerParams::from_json(j.at("scaler"));
  c.score_norm = ScoreNorm{j.at("score_norm").at("min").get<double>(), j.at("score_norm").at("max").get<double>()};
  c.threshold = evalkit::ThresholdReport::from_json(j.at("threshold"));
  c.validation_scores = j.value("validation_scores", std::vector<double>{});
  return c;
}

Calibration calibrate(GanomalyDetector& detector, const flowdata::FlowTable& validation, double q) {
  detector.fit_normalization(validation);
  Calibration c;
  c.model_fingerprint = bundle_fingerprint(detector.model());
  c.scaler = detector.scaler();
  c.score_norm = *detector.model().score_norm;
  c.validation_scores = detector.score(validation);
  c.threshold = evalkit::threshold_from_scores(c.validation_scores, q);
  return c;
}

std::shared_ptr<GanomalyDetector> make_detector(const GanomalyModel& model, const Calibration& calibration) {
  GanomalyModel m = model;
  m.score_norm = calibration.score_norm;
  return std::make_shared<GanomalyDetector>(std::move(m), calibration.scaler);
}

}  // namespace ddoslab::ganomaly
