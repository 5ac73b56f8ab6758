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
#include "evalkit/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "common/error.hpp"
#include "common/stats.hpp"

namespace ddoslab::evalkit {

Json ThresholdReport::to_json() const {
  return Json{{"threshold", threshold}, {"q", q}, {"count", count}, {"min", min}, {"median", median}, {"max", max}};
}

ThresholdReport ThresholdReport::from_json(const Json& j) {
  ThresholdReport t;
  t.threshold = j.at("threshold").get<double>();
  t.q = j.at("q").get<double>();
  t.count = j.value("count", std::size_t{0});
  t.min = j.value("min", 0.0);
  t.median = j.value("median", 0.0);
  t.max = j.value("max", 0.0);
  return t;
}

ThresholdReport threshold_from_scores(std::span<const double> validation_scores, double q) {
  require(!validation_scores.empty(), ErrorKind::precondition, "select_threshold: empty validation set");
  require(q > 0.0 && q < 1.0, ErrorKind::config, "select_threshold: q must lie in (0,1)");
  std::vector<double> sorted(validation_scores.begin(), validation_scores.end());
  std::sort(sorted.begin(), sorted.end());
  ThresholdReport r;
  r.q = q;
  r.count = sorted.size();
  r.threshold = quantile_sorted(sorted, q);
  r.min = sorted.front();
  r.median = quantile_sorted(sorted, 0.5);
  r.max = sorted.back();
  return r;
}

ThresholdReport select_threshold(const Scorer& scorer, const flowdata::FlowTable& validation, double q) {
  require(!validation.empty(), ErrorKind::precondition, "select_threshold: empty validation set");
  require(validation.count(Label::ddos) == 0, ErrorKind::precondition,
          "select_threshold: validation split must be benign-only");
  const auto scores = scorer.score(validation);
  return threshold_from_scores(scores, q);
}

Json EvalReport::to_json() const {
  return Json{{"model", model_id},
              {"dataset", dataset_id},
              {"scaler_owner", scaler_owner},
              {"roc_auc", roc_auc ? Json(*roc_auc) : Json(nullptr)},
              {"f1", f1},
              {"threshold", threshold},
              {"tp", counts.tp},
              {"fp", counts.fp},
              {"tn", counts.tn},
              {"fn", counts.fn}};
}

EvalReport EvalReport::from_json(const Json& j) {
  EvalReport r;
  r.model_id = j.at("model").get<std::string>();
  r.dataset_id = j.at("dataset").get<std::string>();
  r.scaler_owner = j.value("scaler_owner", std::string{});
  if (!j.at("roc_auc").is_null()) r.roc_auc = j.at("roc_auc").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.counts = Confusion{j.at("tp").get<std::int64_t>(), j.at("fp").get<std::int64_t>(), j.at("tn").get<std::int64_t>(),
                       j.at("fn").get<std::int64_t>()};
  return r;
}

EvalReport evaluate(const Scorer& scorer, const flowdata::FlowTable& test, double threshold,
                    const std::string& model_id, const std::string& dataset_id) {
  if (scorer.columns() != test.column_names()) {
    fail(ErrorKind::shape, "evaluate: feature schema of dataset '" + dataset_id + "' (" +
                               std::to_string(test.cols()) + " columns) does not match model '" + model_id + "' (" +
                               std::to_string(scorer.columns().size()) + " columns)");
  }
  EvalReport r;
  r.model_id = model_id;
  r.dataset_id = dataset_id;
  r.threshold = threshold;
  r.scores = scorer.score(test);
  r.predictions = classify(r.scores, threshold);
  r.counts = confusion(r.predictions, test.labels());
  r.f1 = r.counts.f1();
  if (test.count(Label::ddos) > 0 && test.count(Label::benign) > 0) r.roc_auc = roc_auc(r.scores, test.labels());
  return r;
}

const EvalReport& CrossEvalMatrix::at(const std::string& model, const std::string& dataset) const {
  auto m = cells.find(model);
  require(m != cells.end(), ErrorKind::data, "cross-eval: no model '" + model + "'");
  auto d = m->second.find(dataset);
  require(d != m->second.end(), ErrorKind::data, "cross-eval: no cell for '" + model + "' on '" + dataset + "'");
  return d->second;
}

Json CrossEvalMatrix::to_json() const {
  Json cells_json = Json::array();
  for (const auto& m : models) {
    for (const auto& d : datasets) cells_json.push_back(at(m, d).to_json());
  }
  return Json{{"models", models},           {"datasets", datasets},   {"cells", cells_json},
              {"average_f1", average_f1},   {"average_auc", average_auc}, {"sensitivity", sensitivity}};
}

CrossEvalMatrix CrossEvalMatrix::from_json(const Json& j) {
  CrossEvalMatrix m;
  m.models = j.at("models").get<std::vector<std::string>>();
  m.datasets = j.at("datasets").get<std::vector<std::string>>();
  for (const auto& c : j.at("cells")) {
    auto r = EvalReport::from_json(c);
    m.cells[r.model_id][r.dataset_id] = r;
  }
  m.average_f1 = j.at("average_f1").get<std::map<std::string, double>>();
  m.average_auc = j.value("average_auc", std::map<std::string, double>{});
  m.sensitivity = j.value("sensitivity", std::map<std::string, std::map<std::string, double>>{});
  return m;
}

std::string CrossEvalMatrix::to_text() const {
  std::size_t w_model = 5, w_data = 18;
  for (const auto& m : models) w_model = std::max(w_model, m.size());
  for (const auto& d : datasets) w_data = std::max(w_data, d.size());
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %8s  %8s\n", static_cast<int>(w_model), "Model",
                static_cast<int>(w_data), "Evaluation Dataset", "ROC-AUC", "F1-Score");
  out << buf << std::string(w_model + w_data + 24, '-') << '\n';
  for (const auto& m : models) {
    bool first = true;
    for (const auto& d : datasets) {
      const auto& r = at(m, d);
      char auc[32];
      if (r.roc_auc) std::snprintf(auc, sizeof(auc), "%.3f", *r.roc_auc);
      else std::snprintf(auc, sizeof(auc), "n/a");
      std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %8s  %8.3f\n", static_cast<int>(w_model), first ? m.c_str() : "",
                    static_cast<int>(w_data), d.c_str(), auc, r.f1);
      out << buf;
      first = false;
    }
    std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %8s  %8.3f\n", static_cast<int>(w_model), "",
                  static_cast<int>(w_data), "(average)", "", average_f1.at(m));
    out << buf;
  }
  if (!sensitivity.empty()) {
    out << "\nThreshold sensitivity (average F1)\n";
    for (const auto& [model, by_q] : sensitivity) {
      out << "  " << model << ":";
      for (const auto& [q, f] : by_q) {
        std::snprintf(buf, sizeof(buf), "  q=%s %.3f", q.c_str(), f);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

namespace {

const Detector& detector_for(const ModelRow& row, const std::string& dataset) {
  require(!row.detectors.empty(), ErrorKind::config, "cross-eval: model '" + row.id + "' has no detector");
  for (const auto& d : row.detectors) {
    if (d.home == dataset) return d;
  }
  return row.detectors.front();
}

std::string q_key(double q) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", q);
  return buf;
}

}  // namespace

CrossEvalMatrix cross_evaluate(const std::vector<ModelRow>& models,
                               const std::map<std::string, flowdata::FlowTable>& datasets,
                               const std::vector<double>& sensitivity_q) {
  require(!models.empty() && !datasets.empty(), ErrorKind::precondition, "cross-eval: nothing to evaluate");
  const auto& columns = datasets.begin()->second.column_names();
  for (const auto& [name, table] : datasets) {
    require(table.column_names() == columns, ErrorKind::shape,
            "cross-eval: dataset '" + name + "' does not share the common feature set");
  }
  CrossEvalMatrix m;
  for (const auto& [name, _] : datasets) m.datasets.push_back(name);
  for (const auto& row : models) {
    m.models.push_back(row.id);
    double f1_sum = 0.0, auc_sum = 0.0;
    std::size_t auc_n = 0;
    std::map<std::string, double> sens_sum;
    for (const auto& [name, table] : datasets) {
      const auto& det = detector_for(row, name);
      auto report = evaluate(*det.scorer, table, det.threshold, row.id, name);
      report.scaler_owner = det.home;
      f1_sum += report.f1;
      if (report.roc_auc) {
        auc_sum += *report.roc_auc;
        ++auc_n;
      }
      if (!det.validation_scores.empty()) {
        for (double q : sensitivity_q) {
          const double t = threshold_from_scores(det.validation_scores, q).threshold;
          sens_sum[q_key(q)] += confusion(classify(report.scores, t), table.labels()).f1();
        }
      }
      m.cells[row.id][name] = std::move(report);
    }
    const double n = static_cast<double>(datasets.size());
    m.average_f1[row.id] = f1_sum / n;
    if (auc_n > 0) m.average_auc[row.id] = auc_sum / static_cast<double>(auc_n);
    for (const auto& [q, s] : sens_sum) m.sensitivity[row.id][q] = s / n;
  }
  return m;
}

}  // namespace ddoslab::evalkit
