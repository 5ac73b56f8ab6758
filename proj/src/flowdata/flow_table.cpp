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
#include "flowdata/flow_table.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/sha256.hpp"

namespace ddoslab::flowdata {

const char* to_string(Label label) { return label == Label::benign ? "benign" : "ddos"; }

Label label_from_string(const std::string& text) {
  if (text == "benign") return Label::benign;
  if (text == "ddos") return Label::ddos;
  fail(ErrorKind::data, "unknown label '" + text + "'");
}

Json Provenance::to_json() const {
  return Json{{"source", source}, {"steps", steps}, {"counts", counts}, {"synthetic", synthetic}};
}

Provenance Provenance::from_json(const Json& j) {
  Provenance p;
  p.source = j.value("source", std::string{});
  p.steps = j.value("steps", std::vector<std::string>{});
  p.counts = j.value("counts", std::map<std::string, std::int64_t>{});
  p.synthetic = j.value("synthetic", false);
  return p;
}

FlowTable::FlowTable(Matrix features, std::vector<Label> labels, std::vector<std::string> column_names,
                     Provenance provenance)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      column_names_(std::move(column_names)),
      provenance_(std::move(provenance)) {
  require(labels_.size() == rows(), ErrorKind::shape,
          "flow table: " + std::to_string(labels_.size()) + " labels for " + std::to_string(rows()) + " rows");
  require(column_names_.size() == cols(), ErrorKind::shape,
          "flow table: " + std::to_string(column_names_.size()) + " names for " + std::to_string(cols()) + " columns");
}

std::size_t FlowTable::column_index(const std::string& name) const {
  auto it = std::find(column_names_.begin(), column_names_.end(), name);
  if (it == column_names_.end()) fail(ErrorKind::data, "no column '" + name + "'");
  return static_cast<std::size_t>(it - column_names_.begin());
}

std::size_t FlowTable::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

bool FlowTable::all_finite() const { return features_.allFinite(); }

FlowTable FlowTable::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<Label> labels;
  labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < rows(), ErrorKind::shape, "row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(indices[i]));
    labels.push_back(labels_[indices[i]]);
  }
  return FlowTable(std::move(out), std::move(labels), column_names_, provenance_);
}

FlowTable FlowTable::filter(Label label) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows(); ++i) {
    if (labels_[i] == label) idx.push_back(i);
  }
  return select_rows(idx);
}

FlowTable FlowTable::with_features(Matrix features) const {
  return FlowTable(std::move(features), labels_, column_names_, provenance_);
}

FlowTable FlowTable::with_provenance(Provenance provenance) const {
  return FlowTable(features_, labels_, column_names_, std::move(provenance));
}

std::string FlowTable::fingerprint() const {
  Sha256 h;
  h.update("ddoslab.flowtable.v1");
  h.update_u64(cols());
  for (const auto& name : column_names_) {
    h.update(name);
    h.update(std::string_view("\0", 1));
  }
  h.update_u64(rows());
  for (Label l : labels_) h.update_u64(static_cast<std::uint64_t>(l));
  for (Eigen::Index r = 0; r < features_.rows(); ++r) {
    for (Eigen::Index c = 0; c < features_.cols(); ++c) h.update_f64(features_(r, c));
  }
  return h.hex_digest();
}

FlowTable concat_rows(const std::vector<const FlowTable*>& tables, const std::string& source) {
  require(!tables.empty(), ErrorKind::precondition, "concat of zero tables");
  const auto& names = tables.front()->column_names();
  Eigen::Index total = 0;
  for (const auto* t : tables) {
    require(t->column_names() == names, ErrorKind::shape, "concat: column sets differ");
    total += static_cast<Eigen::Index>(t->rows());
  }
  Matrix out(total, static_cast<Eigen::Index>(names.size()));
  std::vector<Label> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Eigen::Index at = 0;
  for (const auto* t : tables) {
    out.middleRows(at, static_cast<Eigen::Index>(t->rows())) = t->features();
    labels.insert(labels.end(), t->labels().begin(), t->labels().end());
    at += static_cast<Eigen::Index>(t->rows());
  }
  Provenance p;
  p.source = source;
  p.steps = {"concat"};
  return FlowTable(std::move(out), std::move(labels), names, std::move(p));
}

}  // namespace ddoslab::flowdata
