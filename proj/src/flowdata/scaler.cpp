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
#include "flowdata/scaler.hpp"

#include "common/error.hpp"
#include "common/sha256.hpp"

namespace ddoslab::flowdata {
namespace {

void check_columns(const FlowTable& table, const ScalerParams& params) {
  if (table.column_names() != params.columns) {
    fail(ErrorKind::shape, "scaler: column set of table '" + table.provenance().source +
                               "' does not match the fitted scaler");
  }
}

}  // namespace

Json ScalerParams::to_json() const {
  return Json{{"columns", columns}, {"min", min}, {"max", max}, {"fitted_on", fitted_on}};
}

ScalerParams ScalerParams::from_json(const Json& j) {
  ScalerParams p;
  p.columns = j.at("columns").get<std::vector<std::string>>();
  p.min = j.at("min").get<std::vector<double>>();
  p.max = j.at("max").get<std::vector<double>>();
  p.fitted_on = j.value("fitted_on", std::string{});
  require(p.min.size() == p.columns.size() && p.max.size() == p.columns.size(), ErrorKind::shape,
          "scaler: inconsistent lengths");
  return p;
}

std::string ScalerParams::fingerprint() const {
  Sha256 h;
  h.update("ddoslab.scaler.v1");
  for (const auto& c : columns) h.update(c).update(std::string_view("\0", 1));
  for (double v : min) h.update_f64(v);
  for (double v : max) h.update_f64(v);
  return h.hex_digest();
}

ScalerParams fit_scaler(const FlowTable& train) {
  require(!train.empty(), ErrorKind::precondition, "fit_scaler: empty table");
  require(train.count(Label::ddos) == 0, ErrorKind::precondition, "fit_scaler: train split must be benign-only");
  require(train.all_finite(), ErrorKind::data, "fit_scaler: non-finite values");
  ScalerParams p;
  p.columns = train.column_names();
  p.fitted_on = train.fingerprint();
  const Matrix& x = train.features();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    p.min.push_back(x.col(c).minCoeff());
    p.max.push_back(x.col(c).maxCoeff());
  }
  return p;
}

Matrix apply_scaler(const Matrix& x, const ScalerParams& params) {
  require(static_cast<std::size_t>(x.cols()) == params.columns.size(), ErrorKind::shape,
          "scaler: column count mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double lo = params.min[static_cast<std::size_t>(c)];
    const double span = params.max[static_cast<std::size_t>(c)] - lo;
    if (span > 0.0) {
      out.col(c) = (x.col(c).array() - lo) / span;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

Matrix invert_scaler(const Matrix& x, const ScalerParams& params) {
  require(static_cast<std::size_t>(x.cols()) == params.columns.size(), ErrorKind::shape,
          "scaler: column count mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double lo = params.min[static_cast<std::size_t>(c)];
    const double span = params.max[static_cast<std::size_t>(c)] - lo;
    out.col(c) = x.col(c).array() * span + lo;
  }
  return out;
}

FlowTable apply_scaler(const FlowTable& table, const ScalerParams& params) {
  check_columns(table, params);
  Provenance p = table.provenance();
  p.steps.push_back("apply_scaler");
  return FlowTable(apply_scaler(table.features(), params), table.labels(), table.column_names(), std::move(p));
}

FlowTable invert_scaler(const FlowTable& table, const ScalerParams& params) {
  check_columns(table, params);
  Provenance p = table.provenance();
  p.steps.push_back("invert_scaler");
  return FlowTable(invert_scaler(table.features(), params), table.labels(), table.column_names(), std::move(p));
}

}  // namespace ddoslab::flowdata
