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
#include "ganomaly/scoring.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "netcore/dense_net.hpp"

namespace ddoslab::ganomaly {

std::vector<double> raw_scores(const GanomalyModel& model, const Matrix& scaled) {
  require(static_cast<std::size_t>(scaled.cols()) == model.config.input_dim, ErrorKind::shape,
          "ganomaly: scoring input has " + std::to_string(scaled.cols()) + " features, model expects " +
              std::to_string(model.config.input_dim));
  const Matrix z1 = netcore::predict(model.ge, scaled);
  const Matrix z2 = netcore::predict(model.e, netcore::predict(model.gd, z1));
  const Vector residual = (z1 - z2).cwiseAbs().rowwise().sum() / static_cast<double>(model.config.latent_dim);
  return {residual.data(), residual.data() + residual.size()};
}

double raw_score(const GanomalyModel& model, std::span<const double> scaled_row) {
  Matrix x = Eigen::Map<const RowVector>(scaled_row.data(), static_cast<Eigen::Index>(scaled_row.size()));
  return raw_scores(model, x).front();
}

void fit_score_norm(GanomalyModel& model, std::span<const double> raw) {
  require(raw.size() >= 2, ErrorKind::precondition, "fit_score_norm: need at least two scores");
  auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  model.score_norm = ScoreNorm{*lo, *hi};
}

AnomalyScore normalize(const GanomalyModel& model, double raw) {
  require(model.score_norm.has_value(), ErrorKind::state, "normalize: score normalisation not fitted");
  const auto& n = *model.score_norm;
  const double span = n.max - n.min;
  const double v = span > 0.0 ? std::clamp((raw - n.min) / span, 0.0, 1.0) : 0.0;
  return AnomalyScore{raw, v};
}

std::vector<double> normalize_all(const GanomalyModel& model, std::span<const double> raw) {
  std::vector<double> out;
  out.reserve(raw.size());
  for (double r : raw) out.push_back(normalize(model, r).normalized);
  return out;
}

}  // namespace ddoslab::ganomaly
