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
#include "federation/fedavg.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace ddoslab::federation {

Weighting weighting_from_string(const std::string& name) {
  if (name == "samples") return Weighting::samples;
  if (name == "uniform") return Weighting::uniform;
  fail(ErrorKind::config, "unknown weighting '" + name + "' (samples|uniform)");
}

const char* to_string(Weighting w) { return w == Weighting::samples ? "samples" : "uniform"; }

netcore::ModelWeights fedavg(const std::vector<ClientUpdate>& updates, Weighting weighting) {
  require(!updates.empty(), ErrorKind::precondition, "fedavg: no updates to aggregate");
  std::vector<const ClientUpdate*> sorted;
  for (const auto& u : updates) sorted.push_back(&u);
  std::sort(sorted.begin(), sorted.end(),
            [](const ClientUpdate* a, const ClientUpdate* b) { return a->client_id < b->client_id; });

  const ClientUpdate& first = *sorted.front();
  const auto shapes = first.weights.shapes();
  double total = 0.0;
  for (const auto* u : sorted) {
    require(u->round == first.round, ErrorKind::precondition,
            "fedavg: client '" + u->client_id + "' sent round " + std::to_string(u->round) + ", expected " +
                std::to_string(first.round));
    require(u->weights.shapes() == shapes, ErrorKind::shape,
            "fedavg: client '" + u->client_id + "' sent tensors of a different shape");
    if (weighting == Weighting::samples) {
      require(u->sample_count > 0, ErrorKind::precondition, "fedavg: client '" + u->client_id + "' reports zero samples");
    }
    total += weighting == Weighting::samples ? static_cast<double>(u->sample_count) : 1.0;
  }

  netcore::ModelWeights out = first.weights;
  for (std::size_t t = 0; t < out.tensors.size(); ++t) {
    auto& values = out.tensors[t].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double base = first.weights.tensors[t].values[i];
      double acc = 0.0;
      double lo = base, hi = base;
      for (const auto* u : sorted) {
        const double w = u->weights.tensors[t].values[i];
        const double n = weighting == Weighting::samples ? static_cast<double>(u->sample_count) : 1.0;
        acc += n * w;
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
      if (lo == hi) {
        values[i] = base;
        continue;
      }
      acc /= total;
      values[i] = std::clamp(acc, lo, hi);
    }
  }
  return out;
}

}  // namespace ddoslab::federation
