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
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "common/matrix.hpp"

namespace ddoslab::netcore {

enum class Activation { linear, relu, leaky_relu, sigmoid, tanh };

inline constexpr double kLeakySlope = 0.2;

const char* to_string(Activation act);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::linear;

  bool operator==(const LayerSpec&) const = default;
};

using Architecture = std::vector<LayerSpec>;

// Builds a chain in -> widths... with `hidden` on every layer but the last.
Architecture make_chain(const std::vector<std::size_t>& dims, Activation hidden, Activation output);

Json architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(const Json& j);

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::linear;
};

// Fully connected feed-forward network. Any mutation of parameters goes
// through mutable_layers(), which bumps generation() and so invalidates
// forward caches taken earlier.
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(std::string name, std::vector<Layer> layers, std::uint64_t seed);

  // Xavier-uniform weights in +-sqrt(6/(in+out)), zero biases.
  static DenseNet init(const std::string& name, const Architecture& arch, std::uint64_t seed);

  const std::string& name() const { return name_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() {
    ++generation_;
    return layers_;
  }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t generation() const { return generation_; }

  Architecture architecture() const;
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

 private:
  std::string name_;
  std::vector<Layer> layers_;
  std::uint64_t seed_ = 0;
  std::uint64_t generation_ = 0;
};

// Activations kept from a forward pass: inputs[k] feeds layer k, outputs[k]
// is what it produced.
struct ForwardCache {
  std::vector<Matrix> inputs;
  std::vector<Matrix> outputs;
  const DenseNet* net = nullptr;
  std::uint64_t generation = 0;

  const Matrix& output() const { return outputs.back(); }
  // Output of layer k (0-based).
  const Matrix& layer_output(std::size_t k) const { return outputs.at(k); }
};

struct LayerGrad {
  Matrix weight;
  Vector bias;
};

struct Gradients {
  std::vector<LayerGrad> layers;
  Matrix input;  // dL/dx for chaining into an upstream network
};

ForwardCache forward(const DenseNet& net, const Matrix& batch);
Matrix predict(const DenseNet& net, const Matrix& batch);

// Whether loss_grad is taken with respect to the layer's activation output or
// its pre-activation (fused sigmoid + cross-entropy).
enum class GradAt { output, preactivation };

// Backpropagates through the first `layer_count` layers (all when 0);
// loss_grad is the gradient at the output of layer layer_count-1.
Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& loss_grad,
                   GradAt at = GradAt::output, std::size_t layer_count = 0);

// Gradient set of matching shape filled with zeros.
Gradients zero_gradients(const DenseNet& net);

}  // namespace ddoslab::netcore
