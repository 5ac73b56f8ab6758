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

#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "flowdata/flow_table.hpp"

namespace ddoslab::flowdata {

// Per-feature min-max rescaling state. Fitted on one silo's benign train
// split and never sent anywhere.
struct ScalerParams {
  std::vector<std::string> columns;
  std::vector<double> min;
  std::vector<double> max;
  std::string fitted_on;

  Json to_json() const;
  static ScalerParams from_json(const Json& j);
  std::string fingerprint() const;
};

ScalerParams fit_scaler(const FlowTable& train);

// (x - min) / (max - min), no clipping; degenerate features (min == max) map to 0.
FlowTable apply_scaler(const FlowTable& table, const ScalerParams& params);
FlowTable invert_scaler(const FlowTable& table, const ScalerParams& params);

Matrix apply_scaler(const Matrix& x, const ScalerParams& params);
Matrix invert_scaler(const Matrix& x, const ScalerParams& params);

}  // namespace ddoslab::flowdata
