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
#include <filesystem>

#include "flowdata/flow_table.hpp"
#include "flowdata/schema.hpp"

namespace ddoslab::flowdata {

// Replaces each flag column by eight 0/1 columns <col>_bit0..<col>_bit7 in
// place. A flag value that is not an integer in [0, 256) marks the row
// invalid: its bit cells become NaN so that clean() removes it.
FlowTable expand_flags(const FlowTable& table, const FlowSchema& schema);

// Removes the schema's drop columns (addresses, ports, identifiers).
FlowTable drop_bias_features(const FlowTable& table, const FlowSchema& schema);

struct CleanOptions {
  double iqr_k = 3.0;
};

// Removes rows holding NaN/inf, then benign rows outside the per-feature
// Tukey fences [Q1 - k*IQR, Q3 + k*IQR] computed on benign rows. Features with
// IQR = 0 are skipped. Fences are recomputed until no row is removed, so
// clean(clean(t)) == clean(t). Attack rows are only null-cleaned.
FlowTable clean(const FlowTable& table, const CleanOptions& options = {});

struct SplitSet {
  FlowTable train;
  FlowTable test;
  FlowTable validation;
  std::uint64_t split_seed = 0;
};

inline constexpr std::size_t kMinBenignRows = 100;

// Benign rows shuffled by seed and cut 80/18/2 into train/test/validation;
// every ddos row goes to test.
SplitSet split(const FlowTable& table, std::uint64_t seed);

// Variant for a labeled fine-tuning domain: benign rows as in split(), and a
// seeded fraction of ddos rows joins the train split instead of test.
SplitSet split_labeled(const FlowTable& table, std::uint64_t seed, double attack_train_fraction);

// load_csv -> expand_flags -> drop_bias_features -> clean.
FlowTable preprocess(const FlowTable& raw, const FlowSchema& schema, const CleanOptions& options = {});

// Writes train.csv, validation.csv, test.csv and provenance.json into dir and
// returns the provenance document.
Json write_split_set(const SplitSet& set, const std::filesystem::path& dir, const Json& extra = {});
SplitSet read_split_set(const std::filesystem::path& dir);

}  // namespace ddoslab::flowdata
