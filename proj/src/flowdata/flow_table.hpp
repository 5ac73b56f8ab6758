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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "common/matrix.hpp"

namespace ddoslab::flowdata {

enum class Label : std::uint8_t { benign = 0, ddos = 1 };

const char* to_string(Label label);
Label label_from_string(const std::string& text);

// Where a table came from and what has been done to it.
struct Provenance {
  std::string source;
  std::vector<std::string> steps;
  std::map<std::string, std::int64_t> counts;
  bool synthetic = false;

  Json to_json() const;
  static Provenance from_json(const Json& j);
};

// Immutable rectangular feature matrix with per-row labels.
class FlowTable {
 public:
  FlowTable(Matrix features, std::vector<Label> labels, std::vector<std::string> column_names,
            Provenance provenance);

  const Matrix& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t rows() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features_.cols()); }
  bool empty() const { return rows() == 0; }

  std::size_t column_index(const std::string& name) const;
  std::size_t count(Label label) const;
  bool all_finite() const;

  FlowTable select_rows(std::span<const std::size_t> indices) const;
  // Rows with the given label, in table order.
  FlowTable filter(Label label) const;
  FlowTable with_features(Matrix features) const;
  FlowTable with_provenance(Provenance provenance) const;

  // SHA-256 over column names, labels and the bit patterns of all values.
  std::string fingerprint() const;

 private:
  Matrix features_;
  std::vector<Label> labels_;
  std::vector<std::string> column_names_;
  Provenance provenance_;
};

FlowTable concat_rows(const std::vector<const FlowTable*>& tables, const std::string& source);

}  // namespace ddoslab::flowdata
