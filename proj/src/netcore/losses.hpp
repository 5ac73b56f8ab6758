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

#include "common/matrix.hpp"

namespace ddoslab::netcore {

struct LossValue {
  double value = 0.0;
  Matrix grad;  // dL/dprediction
};

// Mean over every element of (pred - target)^2.
LossValue mean_squared(const Matrix& pred, const Matrix& target);

// Mean over every element of |pred - target|; subgradient 0 at ties.
LossValue mean_absolute(const Matrix& pred, const Matrix& target);

// Binary cross-entropy of sigmoid outputs, averaged over rows. grad is taken
// with respect to the pre-activation: (p - target) / n.
LossValue binary_cross_entropy(const Matrix& prob, const Matrix& target);

}  // namespace ddoslab::netcore
