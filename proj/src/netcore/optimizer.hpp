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

#include "netcore/dense_net.hpp"

namespace ddoslab::netcore {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-network optimizer state. Adam moments mirror the parameter shapes and
// are created lazily on the first step.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t steps() const { return steps_; }

  // Applies one update. Throws a numeric error naming the tensor when a
  // gradient holds NaN/inf; the network is left untouched in that case.
  void step(DenseNet& net, const Gradients& grads);

 private:
  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<LayerGrad> m_;
  std::vector<LayerGrad> v_;
};

}  // namespace ddoslab::netcore
