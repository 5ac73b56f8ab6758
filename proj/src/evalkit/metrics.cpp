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
#include "evalkit/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"

namespace ddoslab::evalkit {

double Confusion::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
double Confusion::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
double Confusion::f1() const {
  const auto denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  require(scores.size() == labels.size(), ErrorKind::shape, "roc_auc: scores and labels differ in length");
  std::int64_t n_pos = 0;
  for (Label l : labels) n_pos += l == Label::ddos ? 1 : 0;
  const std::int64_t n_neg = static_cast<std::int64_t>(labels.size()) - n_pos;
  require(n_pos > 0 && n_neg > 0, ErrorKind::data, "roc_auc: undefined unless both classes are present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, so tie mid-ranks stay integral.
  std::int64_t rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j share the mid-rank (i+1+j)/2
    const auto mid_x2 = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Label::ddos) rank_sum_x2 += mid_x2;
    }
    i = j;
  }
  const std::int64_t u_x2 = rank_sum_x2 - n_pos * (n_pos + 1);
  return (static_cast<double>(u_x2) / 2.0) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Confusion confusion(std::span<const Label> predictions, std::span<const Label> labels) {
  require(predictions.size() == labels.size(), ErrorKind::shape, "confusion: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == Label::ddos;
    const bool a = labels[i] == Label::ddos;
    if (p && a) ++c.tp;
    else if (p) ++c.fp;
    else if (a) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1(std::span<const Label> predictions, std::span<const Label> labels) {
  return confusion(predictions, labels).f1();
}

std::vector<Label> classify(std::span<const double> scores, double threshold) {
  std::vector<Label> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s > threshold ? Label::ddos : Label::benign);
  return out;
}

}  // namespace ddoslab::evalkit
