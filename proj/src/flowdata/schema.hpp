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

#include "common/json_io.hpp"

namespace ddoslab::flowdata {

// Semantic value range for one column, e.g. protocol in [0, 255] or a
// non-negative duration. Either bound may be open.
struct RangeRule {
  std::optional<double> min;
  std::optional<double> max;
};

// Column layout of one NetFlow source. Validated on construction.
class FlowSchema {
 public:
  FlowSchema(std::vector<std::string> feature_names, std::vector<std::string> flag_columns,
             std::vector<std::string> drop_columns, std::string label_column,
             std::string benign_label_value, std::map<std::string, RangeRule> ranges = {});

  static FlowSchema from_json(const Json& j);
  Json to_json() const;

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& flag_columns() const { return flag_columns_; }
  const std::vector<std::string>& drop_columns() const { return drop_columns_; }
  const std::string& label_column() const { return label_column_; }
  const std::string& benign_label_value() const { return benign_label_value_; }
  const std::map<std::string, RangeRule>& ranges() const { return ranges_; }

  bool is_flag(const std::string& column) const;
  bool is_drop(const std::string& column) const;
  bool is_feature(const std::string& column) const;

  // True when the raw label cell denotes benign traffic. Numeric labels
  // compare by value ("0" == "0.0").
  bool is_benign_label(const std::string& cell) const;

  // Column names after flag expansion and bias-column removal.
  std::vector<std::string> processed_columns() const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::string> flag_columns_;
  std::vector<std::string> drop_columns_;
  std::string label_column_;
  std::string benign_label_value_;
  std::map<std::string, RangeRule> ranges_;
};

std::string flag_bit_name(const std::string& column, int bit);

}  // namespace ddoslab::flowdata
