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

#include <string>
#include <vector>

#include "ganomaly/trainer.hpp"
#include "netcore/weights.hpp"

namespace ddoslab::federation {

enum class Weighting { samples, uniform };

Weighting weighting_from_string(const std::string& name);
const char* to_string(Weighting w);

// What a participant sends after local training: parameters and a row count.
// Never raw flows and never scaler values.
struct ClientUpdate {
  std::string client_id;
  std::size_t round = 0;
  netcore::ModelWeights weights;
  std::uint64_t sample_count = 0;
  ganomaly::LossSummary loss;
};

// Elementwise weighted mean of the updates' tensors, weights n_k / sum(n)
// (or uniform). Updates are reduced in client-id order, as
//   w_first + sum_k n_k * (w_k - w_first) / N,
// so identical updates aggregate exactly and the order of the input list
// does not matter. Results are clamped to [min_k, max_k] per element.
netcore::ModelWeights fedavg(const std::vector<ClientUpdate>& updates, Weighting weighting = Weighting::samples);

}  // namespace ddoslab::federation
