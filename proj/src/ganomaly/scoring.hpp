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

#include <vector>

#include "common/matrix.hpp"
#include "ganomaly/model.hpp"

namespace ddoslab::ganomaly {

struct AnomalyScore {
  double raw = 0.0;
  double normalized = 0.0;
};

// Mean absolute latent residual |GE(x) - E(GD(GE(x)))|_1 / latent_dim, one
// value per row of an already-scaled batch.
std::vector<double> raw_scores(const GanomalyModel& model, const Matrix& scaled);
double raw_score(const GanomalyModel& model, std::span<const double> scaled_row);

// Stores min/max of the population. Needs at least two scores.
void fit_score_norm(GanomalyModel& model, std::span<const double> raw);

// clamp((raw - min) / (max - min), 0, 1); 0 when min == max.
AnomalyScore normalize(const GanomalyModel& model, double raw);
std::vector<double> normalize_all(const GanomalyModel& model, std::span<const double> raw);

}  // namespace ddoslab::ganomaly
