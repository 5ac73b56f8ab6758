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

#include "flowdata/flow_table.hpp"

namespace ddoslab::evalkit {

// Anything that maps processed (unscaled) flows to anomaly scores in [0,1].
// Implementations carry their own preprocessing (scaler, normalisation).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(const flowdata::FlowTable& table) const = 0;
  virtual const std::vector<std::string>& columns() const = 0;
};

}  // namespace ddoslab::evalkit
