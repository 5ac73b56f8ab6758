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
#include "flowdata/csv.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace ddoslab::flowdata {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

enum class Cell { ok, null, bad };

Cell parse_cell(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) {
    out = std::numeric_limits<double>::quiet_NaN();
    return Cell::null;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) return Cell::bad;
  return std::isnan(out) ? Cell::null : Cell::ok;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

FlowTable load_csv(const std::filesystem::path& path, const FlowSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open dataset " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::data, path.string() + ": empty file");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = std::string(trim(h));

  std::set<std::string> expected(schema.feature_names().begin(), schema.feature_names().end());
  expected.insert(schema.drop_columns().begin(), schema.drop_columns().end());
  expected.insert(schema.label_column());
  std::set<std::string> present(header.begin(), header.end());
  std::vector<std::string> missing, extra;
  for (const auto& e : expected) if (!present.count(e)) missing.push_back(e);
  for (const auto& p : present) if (!expected.count(p)) extra.push_back(p);
  if (!missing.empty() || !extra.empty() || present.size() != header.size()) {
    std::ostringstream msg;
    msg << path.string() << ": header mismatch;";
    msg << " missing [";
    for (std::size_t i = 0; i < missing.size(); ++i) msg << (i ? ", " : "") << missing[i];
    msg << "] extra [";
    for (std::size_t i = 0; i < extra.size(); ++i) msg << (i ? ", " : "") << extra[i];
    msg << "]";
    if (present.size() != header.size()) msg << " (duplicate header names)";
    fail(ErrorKind::data, msg.str());
  }

  std::size_t label_pos = 0;
  std::vector<std::string> columns;
  std::vector<std::size_t> column_pos;
  std::vector<bool> strict;  // feature columns must parse
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.label_column()) {
      label_pos = i;
      continue;
    }
    columns.push_back(header[i]);
    column_pos.push_back(i);
    strict.push_back(schema.is_feature(header[i]));
  }

  std::vector<double> values;
  std::vector<Label> labels;
  std::int64_t unparseable = 0;
  std::int64_t malformed = 0;
  std::vector<double> row(columns.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      ++malformed;
      continue;
    }
    bool bad = false;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      Cell kind = parse_cell(cells[column_pos[c]], row[c]);
      if (kind == Cell::bad) {
        if (strict[c]) {
          bad = true;
          break;
        }
        row[c] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (bad) {
      ++unparseable;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(schema.is_benign_label(cells[label_pos]) ? Label::benign : Label::ddos);
  }
  if (labels.empty()) fail(ErrorKind::data, path.string() + ": no parseable rows");

  Matrix features = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                       static_cast<Eigen::Index>(columns.size()));
  Provenance p;
  p.source = path.stem().string();
  p.steps = {"load_csv"};
  p.counts["loaded_rows"] = static_cast<std::int64_t>(labels.size());
  p.counts["excluded_unparseable"] = unparseable;
  p.counts["excluded_malformed"] = malformed;
  return FlowTable(std::move(features), std::move(labels), std::move(columns), std::move(p));
}

void write_table_csv(const FlowTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  for (const auto& name : table.column_names()) out << name << ',';
  out << "label\n";
  const Matrix& x = table.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) out << format_double(x(r, c)) << ',';
    out << to_string(table.labels()[static_cast<std::size_t>(r)]) << '\n';
  }
  if (!out) fail(ErrorKind::io, "short write to " + path.string());
}

FlowTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::data, path.string() + ": empty file");
  auto header = split_csv_line(line);
  require(header.size() >= 2 && header.back() == "label", ErrorKind::data,
          path.string() + ": processed table must end with a 'label' column");
  header.pop_back();

  std::vector<double> values;
  std::vector<Label> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    require(cells.size() == header.size() + 1, ErrorKind::data,
            path.string() + ":" + std::to_string(lineno) + ": wrong cell count");
    for (std::size_t c = 0; c < header.size(); ++c) {
      double v = 0;
      if (parse_cell(cells[c], v) == Cell::bad) {
        fail(ErrorKind::data, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[c] + "'");
      }
      values.push_back(v);
    }
    labels.push_back(label_from_string(std::string(trim(cells.back()))));
  }
  Matrix features = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                       static_cast<Eigen::Index>(header.size()));
  Provenance p;
  p.source = path.stem().string();
  p.steps = {"read_table_csv"};
  return FlowTable(std::move(features), std::move(labels), std::move(header), std::move(p));
}

}  // namespace ddoslab::flowdata
