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
#include "ganomaly/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "common/error.hpp"
#include "netcore/dense_net.hpp"

namespace ddoslab::ganomaly {

flowdata::FlowTable generate_synthetic(const GanomalyModel& model, std::size_t n, Rng& rng,
                                       const flowdata::ScalerParams& scaler) {
  require(n >= 1, ErrorKind::precondition, "generate_synthetic: n must be at least 1");
  require(model.trained_epochs > 0, ErrorKind::state, "generate_synthetic: model is untrained");
  require(scaler.columns.size() == model.config.input_dim, ErrorKind::shape,
          "generate_synthetic: scaler does not match model input");
  const auto z = static_cast<Eigen::Index>(model.config.latent_dim);
  const Vector& mu = model.latent.mean;
  require(mu.allFinite() && model.latent.second_moment.allFinite(), ErrorKind::numeric,
          "generate_synthetic: non-finite latent statistics");
  Matrix cov = model.latent.second_moment - mu * mu.transpose();
  cov = 0.5 * (cov + cov.transpose());
  // Eigen-decomposition tolerates the rank-deficient covariances small silos produce.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  require(root.maxCoeff() > 1e-12, ErrorKind::numeric, "generate_synthetic: degenerate latent statistics (zero variance)");
  const Matrix factor = eig.eigenvectors() * root.asDiagonal();

  Matrix noise(static_cast<Eigen::Index>(n), z);
  for (Eigen::Index i = 0; i < noise.rows(); ++i) {
    for (Eigen::Index j = 0; j < z; ++j) noise(i, j) = rng.normal();
  }
  Matrix codes = (noise * factor.transpose()).rowwise() + mu.transpose();
  Matrix decoded = netcore::predict(model.gd, codes);
  flowdata::Provenance p;
  p.source = "synthetic";
  p.steps = {"generate_synthetic"};
  p.synthetic = true;
  p.counts["generated_rows"] = static_cast<std::int64_t>(n);
  return flowdata::FlowTable(flowdata::invert_scaler(decoded, scaler), std::vector<flowdata::Label>(n, flowdata::Label::benign),
                             scaler.columns, std::move(p));
}

namespace {

struct RuledColumn {
  std::size_t index;
  std::string name;
  flowdata::RangeRule rule;
};

std::vector<RuledColumn> ruled_columns(const flowdata::FlowTable& table,
                                       const std::map<std::string, flowdata::RangeRule>& ranges) {
  std::vector<RuledColumn> out;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    auto it = ranges.find(table.column_names()[c]);
    if (it != ranges.end()) out.push_back({c, it->first, it->second});
  }
  return out;
}

}  // namespace

Json AuditReport::to_json() const {
  Json features = Json::object();
  for (const auto& [name, v] : per_feature) {
    features[name] = {{"below_min", v.below_min}, {"above_max", v.above_max}, {"non_finite", v.non_finite}};
  }
  return Json{{"rows", rows},
              {"rows_with_violations", rows_with_violations},
              {"violation_ratio", violation_ratio()},
              {"per_feature", features},
              {"nearest_neighbour_histogram", {{"edges", nn_edges}, {"counts", nn_counts}}}};
}

AuditReport AuditReport::from_json(const Json& j) {
  AuditReport r;
  r.rows = j.at("rows").get<std::size_t>();
  r.rows_with_violations = j.at("rows_with_violations").get<std::size_t>();
  const Json features = j.value("per_feature", Json::object());
  for (const auto& [name, v] : features.items()) {
    r.per_feature[name] = {v.at("below_min").get<std::int64_t>(), v.at("above_max").get<std::int64_t>(),
                           v.at("non_finite").get<std::int64_t>()};
  }
  if (j.contains("nearest_neighbour_histogram")) {
    const auto& h = j["nearest_neighbour_histogram"];
    r.nn_edges = h.value("edges", std::vector<double>{});
    r.nn_counts = h.value("counts", std::vector<std::int64_t>{});
  }
  return r;
}

AuditReport audit_synthetic(const flowdata::FlowTable& table, const std::map<std::string, flowdata::RangeRule>& ranges,
                            const AuditOptions& options) {
  AuditReport report;
  report.rows = table.rows();
  const auto cols = ruled_columns(table, ranges);
  for (const auto& c : cols) report.per_feature[c.name];
  const Matrix& x = table.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    bool any = false;
    for (const auto& c : cols) {
      const double v = x(r, static_cast<Eigen::Index>(c.index));
      auto& slot = report.per_feature[c.name];
      if (!std::isfinite(v)) {
        ++slot.non_finite;
        any = true;
      } else if (c.rule.min && v < *c.rule.min) {
        ++slot.below_min;
        any = true;
      } else if (c.rule.max && v > *c.rule.max) {
        ++slot.above_max;
        any = true;
      }
    }
    if (any) ++report.rows_with_violations;
  }

  if (options.reference && options.scaler && !table.empty() && !options.reference->empty()) {
    const Matrix ref = flowdata::apply_scaler(options.reference->features(), *options.scaler);
    const Matrix syn = flowdata::apply_scaler(table.features(), *options.scaler);
    const Eigen::Index m = std::min<Eigen::Index>(syn.rows(), static_cast<Eigen::Index>(options.nn_sample));
    const Eigen::Index ref_rows = std::min<Eigen::Index>(ref.rows(), 5000);
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < ref_rows; ++j) best = std::min(best, (syn.row(i) - ref.row(j)).squaredNorm());
      dist.push_back(std::sqrt(best));
    }
    const double top = *std::max_element(dist.begin(), dist.end());
    const std::size_t bins = std::max<std::size_t>(options.nn_bins, 1);
    const double width = top > 0.0 ? top / static_cast<double>(bins) : 1.0;
    report.nn_counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; ++b) report.nn_edges.push_back(width * static_cast<double>(b));
    for (double d : dist) {
      auto b = static_cast<std::size_t>(d / width);
      ++report.nn_counts[std::min(b, bins - 1)];
    }
  }
  return report;
}

flowdata::FlowTable filter_violations(const flowdata::FlowTable& table,
                                      const std::map<std::string, flowdata::RangeRule>& ranges) {
  const auto cols = ruled_columns(table, ranges);
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool ok = true;
    for (const auto& c : cols) {
      const double v = table.features()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c.index));
      if (!std::isfinite(v) || (c.rule.min && v < *c.rule.min) || (c.rule.max && v > *c.rule.max)) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(r);
  }
  return table.select_rows(keep);
}

std::map<std::string, flowdata::RangeRule> processed_ranges(const flowdata::FlowSchema& schema) {
  std::map<std::string, flowdata::RangeRule> out;
  for (const auto& [name, rule] : schema.ranges()) {
    if (schema.is_flag(name)) {
      for (int k = 0; k < 8; ++k) out[flowdata::flag_bit_name(name, k)] = flowdata::RangeRule{0.0, 1.0};
    } else {
      out[name] = rule;
    }
  }
  return out;
}

}  // namespace ddoslab::ganomaly
