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
#include <span>
#include <vector>

#include "flowdata/flow_table.hpp"

namespace ddoslab::evalkit {

using flowdata::Label;

// Positive class is ddos.
struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  double precision() const;
  double recall() const;
  double f1() const;
};

// Probability that a random ddos row outscores a random benign row, ties
// counted one half (Mann-Whitney U from mid-ranks).
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

Confusion confusion(std::span<const Label> predictions, std::span<const Label> labels);

// 2tp / (2tp + fp + fn); 0 when the denominator is 0.
double f1(std::span<const Label> predictions, std::span<const Label> labels);

// score > threshold => ddos.
std::vector<Label> classify(std::span<const double> scores, double threshold);

}  // namespace ddoslab::evalkit
