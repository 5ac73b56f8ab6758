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
#include "netcore/optimizer.hpp"

#include <cmath>

#include "common/error.hpp"

namespace ddoslab::netcore {

void Optimizer::step(DenseNet& net, const Gradients& grads) {
  const auto& layers = net.layers();
  require(grads.layers.size() == layers.size(), ErrorKind::shape,
          net.name() + ": gradient set has " + std::to_string(grads.layers.size()) + " layers, network has " +
              std::to_string(layers.size()));
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& g = grads.layers[k];
    require(g.weight.rows() == layers[k].weight.rows() && g.weight.cols() == layers[k].weight.cols() &&
                g.bias.size() == layers[k].bias.size(),
            ErrorKind::shape, net.name() + ": gradient shape mismatch in layer " + std::to_string(k));
    if (!g.weight.allFinite()) fail(ErrorKind::numeric, net.name() + ".layer" + std::to_string(k) + ".weight: non-finite gradient");
    if (!g.bias.allFinite()) fail(ErrorKind::numeric, net.name() + ".layer" + std::to_string(k) + ".bias: non-finite gradient");
  }

  ++steps_;
  auto& params = net.mutable_layers();
  if (config_.kind == OptimizerKind::sgd) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      params[k].weight -= config_.learning_rate * grads.layers[k].weight;
      params[k].bias -= config_.learning_rate * grads.layers[k].bias;
    }
    return;
  }

  if (m_.empty()) {
    for (const auto& l : params) {
      m_.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
      v_.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
    }
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& g = grads.layers[k];
    m_[k].weight = b1 * m_[k].weight + (1.0 - b1) * g.weight;
    v_[k].weight = b2 * v_[k].weight + (1.0 - b2) * g.weight.cwiseProduct(g.weight);
    m_[k].bias = b1 * m_[k].bias + (1.0 - b1) * g.bias;
    v_[k].bias = b2 * v_[k].bias + (1.0 - b2) * g.bias.cwiseProduct(g.bias);
    params[k].weight.array() -= lr * (m_[k].weight.array() / c1) / ((v_[k].weight.array() / c2).sqrt() + eps);
    params[k].bias.array() -= lr * (m_[k].bias.array() / c1) / ((v_[k].bias.array() / c2).sqrt() + eps);
  }
}

}  // namespace ddoslab::netcore
