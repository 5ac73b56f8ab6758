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
#include <optional>
#include <string>
#include <vector>

#include "common/random.hpp"
#include "flowdata/flow_table.hpp"
#include "flowdata/scaler.hpp"
#include "flowdata/schema.hpp"
#include "ganomaly/model.hpp"

namespace ddoslab::ganomaly {

// Samples z from the full-covariance Gaussian fitted to GE(x) over the training
// data, decodes with GD and maps back to feature units with `scaler`. Rows
// are labeled benign and the provenance is marked synthetic.
flowdata::FlowTable generate_synthetic(const GanomalyModel& model, std::size_t n, Rng& rng,
                                       const flowdata::ScalerParams& scaler);

struct FeatureViolations {
  std::int64_t below_min = 0;
  std::int64_t above_max = 0;
  std::int64_t non_finite = 0;

  std::int64_t total() const { return below_min + above_max + non_finite; }
};

struct AuditReport {
  std::size_t rows = 0;
  std::size_t rows_with_violations = 0;
  std::map<std::string, FeatureViolations> per_feature;  // only ruled columns
  // Nearest-neighbour distances from synthetic rows to reference rows
  // (scaled units). Informational, not a privacy guarantee.
  std::vector<double> nn_edges;
  std::vector<std::int64_t> nn_counts;

  double violation_ratio() const {
    return rows == 0 ? 0.0 : static_cast<double>(rows_with_violations) / static_cast<double>(rows);
  }
  Json to_json() const;
  static AuditReport from_json(const Json& j);
};

struct AuditOptions {
  // Reference table (e.g. the training split) for the nearest-neighbour
  // histogram, together with the scaler used to compare rows.
  const flowdata::FlowTable* reference = nullptr;
  const flowdata::ScalerParams* scaler = nullptr;
  std::size_t nn_sample = 1000;
  std::size_t nn_bins = 10;
};

// Counts range-rule violations per feature. Columns without a rule are not
// checked; an empty rule set yields an empty report. The table is unchanged.
AuditReport audit_synthetic(const flowdata::FlowTable& table, const std::map<std::string, flowdata::RangeRule>& ranges,
                            const AuditOptions& options = {});

// Copy of table without rows that break any rule.
flowdata::FlowTable filter_violations(const flowdata::FlowTable& table,
                                      const std::map<std::string, flowdata::RangeRule>& ranges);

// Range rules expressed on processed columns: a rule on a flag column
// becomes [0,1] on each of its bit columns.
std::map<std::string, flowdata::RangeRule> processed_ranges(const flowdata::FlowSchema& schema);

}  // namespace ddoslab::ganomaly
