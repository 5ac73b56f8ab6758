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
#include "flowdata/schema.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "common/error.hpp"

namespace ddoslab::flowdata {
namespace {

void require_unique(const std::vector<std::string>& names, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) fail(ErrorKind::config, "schema: duplicate " + what + " '" + n + "'");
  }
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

FlowSchema::FlowSchema(std::vector<std::string> feature_names, std::vector<std::string> flag_columns,
                       std::vector<std::string> drop_columns, std::string label_column,
                       std::string benign_label_value, std::map<std::string, RangeRule> ranges)
    : feature_names_(std::move(feature_names)),
      flag_columns_(std::move(flag_columns)),
      drop_columns_(std::move(drop_columns)),
      label_column_(std::move(label_column)),
      benign_label_value_(std::move(benign_label_value)),
      ranges_(std::move(ranges)) {
  require(!feature_names_.empty(), ErrorKind::config, "schema: feature list is empty");
  require(!label_column_.empty(), ErrorKind::config, "schema: label column is empty");
  require_unique(feature_names_, "feature");
  require_unique(flag_columns_, "flag column");
  require_unique(drop_columns_, "drop column");
  for (const auto& f : flag_columns_) {
    require(contains(feature_names_, f), ErrorKind::config, "schema: flag column '" + f + "' is not a feature");
    require(!contains(drop_columns_, f), ErrorKind::config, "schema: '" + f + "' is both flag and drop column");
  }
  for (const auto& d : drop_columns_) {
    require(!contains(feature_names_, d), ErrorKind::config, "schema: drop column '" + d + "' is also a feature");
  }
  require(!contains(feature_names_, label_column_) && !contains(drop_columns_, label_column_),
          ErrorKind::config, "schema: label column '" + label_column_ + "' must not be a feature or drop column");
  for (const auto& [name, rule] : ranges_) {
    if (rule.min && rule.max) {
      require(*rule.min <= *rule.max, ErrorKind::config, "schema: empty range for '" + name + "'");
    }
  }
}

FlowSchema FlowSchema::from_json(const Json& j) {
  try {
    std::map<std::string, RangeRule> ranges;
    if (j.contains("ranges")) {
      for (const auto& [name, r] : j.at("ranges").items()) {
        RangeRule rule;
        if (!r.at(0).is_null()) rule.min = r.at(0).get<double>();
        if (!r.at(1).is_null()) rule.max = r.at(1).get<double>();
        ranges[name] = rule;
      }
    }
    const auto& benign = j.at("benign_label");
    std::string benign_value = benign.is_string() ? benign.get<std::string>() : benign.dump();
    return FlowSchema(j.at("features").get<std::vector<std::string>>(),
                      j.value("flag_columns", std::vector<std::string>{}),
                      j.value("drop_columns", std::vector<std::string>{}),
                      j.at("label_column").get<std::string>(), benign_value, std::move(ranges));
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, std::string("schema: ") + e.what());
  }
}

Json FlowSchema::to_json() const {
  Json ranges = Json::object();
  for (const auto& [name, rule] : ranges_) {
    ranges[name] = Json::array({rule.min ? Json(*rule.min) : Json(nullptr), rule.max ? Json(*rule.max) : Json(nullptr)});
  }
  return Json{{"features", feature_names_},   {"flag_columns", flag_columns_},
              {"drop_columns", drop_columns_}, {"label_column", label_column_},
              {"benign_label", benign_label_value_}, {"ranges", ranges}};
}

bool FlowSchema::is_flag(const std::string& column) const { return contains(flag_columns_, column); }
bool FlowSchema::is_drop(const std::string& column) const { return contains(drop_columns_, column); }
bool FlowSchema::is_feature(const std::string& column) const { return contains(feature_names_, column); }

bool FlowSchema::is_benign_label(const std::string& cell) const {
  std::string_view c = cell;
  while (!c.empty() && (c.back() == ' ' || c.back() == '\r')) c.remove_suffix(1);
  while (!c.empty() && c.front() == ' ') c.remove_prefix(1);
  if (c == benign_label_value_) return true;
  auto a = parse_number(c);
  auto b = parse_number(benign_label_value_);
  return a && b && *a == *b;
}

std::vector<std::string> FlowSchema::processed_columns() const {
  std::vector<std::string> out;
  for (const auto& f : feature_names_) {
    if (is_flag(f)) {
      for (int k = 0; k < 8; ++k) out.push_back(flag_bit_name(f, k));
    } else {
      out.push_back(f);
    }
  }
  return out;
}

std::string flag_bit_name(const std::string& column, int bit) { return column + "_bit" + std::to_string(bit); }

}  // namespace ddoslab::flowdata
