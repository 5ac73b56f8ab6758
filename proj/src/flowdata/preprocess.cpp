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
#include "flowdata/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/sha256.hpp"
#include "common/stats.hpp"
#include "flowdata/csv.hpp"

namespace ddoslab::flowdata {

FlowTable expand_flags(const FlowTable& table, const FlowSchema& schema) {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, int>> source;  // (input column, bit or -1)
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const auto& name = table.column_names()[c];
    if (schema.is_flag(name)) {
      for (int k = 0; k < 8; ++k) {
        names.push_back(flag_bit_name(name, k));
        source.emplace_back(c, k);
      }
    } else {
      names.push_back(name);
      source.emplace_back(c, -1);
    }
  }
  for (const auto& f : schema.flag_columns()) table.column_index(f);

  const Matrix& in = table.features();
  Matrix out(in.rows(), static_cast<Eigen::Index>(names.size()));
  std::int64_t invalid = 0;
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    bool row_invalid = false;
    for (std::size_t j = 0; j < source.size(); ++j) {
      const auto [c, bit] = source[j];
      const double v = in(r, static_cast<Eigen::Index>(c));
      if (bit < 0) {
        out(r, static_cast<Eigen::Index>(j)) = v;
        continue;
      }
      if (!(v >= 0.0 && v < 256.0) || v != std::floor(v)) {
        out(r, static_cast<Eigen::Index>(j)) = std::numeric_limits<double>::quiet_NaN();
        row_invalid = true;
        continue;
      }
      const auto bits = static_cast<unsigned>(v);
      out(r, static_cast<Eigen::Index>(j)) = static_cast<double>((bits >> bit) & 1U);
    }
    if (row_invalid) ++invalid;
  }
  Provenance p = table.provenance();
  p.steps.push_back("expand_flags");
  p.counts["invalid_flag_rows"] += invalid;
  return FlowTable(std::move(out), table.labels(), std::move(names), std::move(p));
}

FlowTable drop_bias_features(const FlowTable& table, const FlowSchema& schema) {
  std::vector<std::string> absent;
  for (const auto& d : schema.drop_columns()) {
    const auto& names = table.column_names();
    if (std::find(names.begin(), names.end(), d) == names.end()) absent.push_back(d);
  }
  if (!absent.empty()) {
    std::string msg = "drop_bias_features: columns not present:";
    for (const auto& a : absent) msg += " " + a;
    fail(ErrorKind::data, msg);
  }
  std::vector<Eigen::Index> keep;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (!schema.is_drop(table.column_names()[c])) {
      keep.push_back(static_cast<Eigen::Index>(c));
      names.push_back(table.column_names()[c]);
    }
  }
  Matrix out(table.features().rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = table.features().col(keep[j]);
  Provenance p = table.provenance();
  p.steps.push_back("drop_bias_features");
  return FlowTable(std::move(out), table.labels(), std::move(names), std::move(p));
}

namespace {

// One pass of Tukey fencing over benign rows; returns the kept row indices.
std::vector<std::size_t> fence_pass(const FlowTable& t, double k) {
  const Matrix& x = t.features();
  std::vector<double> lo(t.cols(), -std::numeric_limits<double>::infinity());
  std::vector<double> hi(t.cols(), std::numeric_limits<double>::infinity());
  std::vector<double> column;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    column.clear();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (t.labels()[r] == Label::benign) column.push_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    if (column.size() < 2) continue;
    std::sort(column.begin(), column.end());
    const double q1 = quantile_sorted(column, 0.25);
    const double q3 = quantile_sorted(column, 0.75);
    const double iqr = q3 - q1;
    if (iqr <= 0.0) continue;
    lo[c] = q1 - k * iqr;
    hi[c] = q3 + k * iqr;
  }
  std::vector<std::size_t> keep;
  keep.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    bool inside = true;
    if (t.labels()[r] == Label::benign) {
      for (std::size_t c = 0; c < t.cols() && inside; ++c) {
        const double v = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        inside = v >= lo[c] && v <= hi[c];
      }
    }
    if (inside) keep.push_back(r);
  }
  return keep;
}

}  // namespace

FlowTable clean(const FlowTable& table, const CleanOptions& options) {
  require(options.iqr_k > 0.0, ErrorKind::config, "clean: iqr_k must be positive");
  std::vector<std::size_t> finite_rows;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.features().row(static_cast<Eigen::Index>(r)).allFinite()) finite_rows.push_back(r);
  }
  const auto removed_null = static_cast<std::int64_t>(table.rows() - finite_rows.size());
  FlowTable current = table.select_rows(finite_rows);

  std::int64_t removed_outlier = 0;
  for (;;) {
    auto keep = fence_pass(current, options.iqr_k);
    if (keep.size() == current.rows()) break;
    removed_outlier += static_cast<std::int64_t>(current.rows() - keep.size());
    current = current.select_rows(keep);
  }
  if (current.empty()) fail(ErrorKind::data, "clean: every row was removed");

  Provenance p = table.provenance();
  p.steps.push_back("clean");
  p.counts["removed_null"] += removed_null;
  p.counts["removed_outlier"] += removed_outlier;
  return current.with_provenance(std::move(p));
}

namespace {

SplitSet split_impl(const FlowTable& table, std::uint64_t seed, double attack_train_fraction) {
  std::vector<std::size_t> benign, ddos;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    (table.labels()[r] == Label::benign ? benign : ddos).push_back(r);
  }
  if (benign.size() < kMinBenignRows) {
    fail(ErrorKind::data, "split: need at least " + std::to_string(kMinBenignRows) + " benign rows, have " +
                              std::to_string(benign.size()));
  }
  Rng rng(derive_seed(seed, "flowdata.split", 0));
  rng.shuffle(benign);
  const std::size_t n = benign.size();
  const auto n_train = static_cast<std::size_t>(std::llround(0.80 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(0.02 * static_cast<double>(n)));

  std::vector<std::size_t> train(benign.begin(), benign.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val(benign.begin() + static_cast<std::ptrdiff_t>(n_train),
                               benign.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  std::vector<std::size_t> test(benign.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), benign.end());

  if (attack_train_fraction > 0.0) {
    Rng attack_rng(derive_seed(seed, "flowdata.split.attack", 0));
    attack_rng.shuffle(ddos);
    const auto n_attack = static_cast<std::size_t>(
        std::llround(attack_train_fraction * static_cast<double>(ddos.size())));
    train.insert(train.end(), ddos.begin(), ddos.begin() + static_cast<std::ptrdiff_t>(n_attack));
    test.insert(test.end(), ddos.begin() + static_cast<std::ptrdiff_t>(n_attack), ddos.end());
  } else {
    test.insert(test.end(), ddos.begin(), ddos.end());
  }

  auto part = [&](const std::vector<std::size_t>& idx, const char* name) {
    FlowTable t = table.select_rows(idx);
    Provenance p = table.provenance();
    p.steps.push_back(std::string("split:") + name);
    p.counts["split_seed"] = static_cast<std::int64_t>(seed);
    return t.with_provenance(std::move(p));
  };
  return SplitSet{part(train, "train"), part(test, "test"), part(val, "validation"), seed};
}

}  // namespace

SplitSet split(const FlowTable& table, std::uint64_t seed) { return split_impl(table, seed, 0.0); }

SplitSet split_labeled(const FlowTable& table, std::uint64_t seed, double attack_train_fraction) {
  require(attack_train_fraction >= 0.0 && attack_train_fraction <= 1.0, ErrorKind::config,
          "split_labeled: attack_train_fraction outside [0,1]");
  return split_impl(table, seed, attack_train_fraction);
}

FlowTable preprocess(const FlowTable& raw, const FlowSchema& schema, const CleanOptions& options) {
  return clean(drop_bias_features(expand_flags(raw, schema), schema), options);
}

Json write_split_set(const SplitSet& set, const std::filesystem::path& dir, const Json& extra) {
  std::filesystem::create_directories(dir);
  Json doc;
  doc["split_seed"] = set.split_seed;
  doc["columns"] = set.train.column_names();
  const std::pair<const char*, const FlowTable*> parts[] = {
      {"train", &set.train}, {"validation", &set.validation}, {"test", &set.test}};
  for (const auto& [name, table] : parts) {
    const auto file = dir / (std::string(name) + ".csv");
    write_table_csv(*table, file);
    doc["splits"][name] = Json{{"rows", table->rows()},
                               {"benign", table->count(Label::benign)},
                               {"ddos", table->count(Label::ddos)},
                               {"fingerprint", sha256_file(file)}};
  }
  doc["provenance"] = set.train.provenance().to_json();
  doc["provenance"]["steps"].erase(doc["provenance"]["steps"].size() - 1);
  if (!extra.is_null()) doc["extra"] = extra;
  write_json_file(dir / "provenance.json", doc);
  return doc;
}

SplitSet read_split_set(const std::filesystem::path& dir) {
  const auto doc = read_json_file(dir / "provenance.json");
  auto load = [&](const char* name) {
    auto t = read_table_csv(dir / (std::string(name) + ".csv"));
    Provenance p = Provenance::from_json(doc.at("provenance"));
    p.steps.push_back(std::string("split:") + name);
    return t.with_provenance(std::move(p));
  };
  return SplitSet{load("train"), load("test"), load("validation"), doc.at("split_seed").get<std::uint64_t>()};
}

}  // namespace ddoslab::flowdata
