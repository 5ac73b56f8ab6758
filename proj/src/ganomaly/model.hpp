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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "netcore/dense_net.hpp"
#include "netcore/weights.hpp"

namespace ddoslab::ganomaly {

// Hyper-parameters shared by every participant of a federation. hidden lists
// the encoder widths; the decoder mirrors them.
struct GanomalyConfig {
  std::size_t input_dim = 0;
  std::size_t latent_dim = 32;
  std::vector<std::size_t> hidden = {1024, 512, 256};
  double w_adv = 1.0;
  double w_con = 50.0;
  double w_enc = 1.0;
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t batch_size = 256;

  void validate() const;
  Json to_json() const;
  static GanomalyConfig from_json(const Json& j, std::size_t input_dim = 0);
};

struct GanomalyArch {
  netcore::Architecture encoder;        // GE and E
  netcore::Architecture decoder;        // GD
  netcore::Architecture discriminator;  // D
};

GanomalyArch make_arch(const GanomalyConfig& config);

// SHA-256 over the architecture, training hyper-parameters and the feature
// columns. Participants must agree on it before exchanging weights.
std::string architecture_hash(const GanomalyConfig& config, const std::vector<std::string>& columns);

struct ScoreNorm {
  double min = 0.0;
  double max = 0.0;
};

// Gaussian moments of GE(x) over a training set, stored as the mean and the
// raw second-moment matrix E[z z^T] so that sample-weighted averaging pools
// them exactly.
struct LatentStats {
  Vector mean;
  Matrix second_moment;
};

struct GanomalyModel {
  GanomalyConfig config;
  netcore::DenseNet ge;  // encoder
  netcore::DenseNet gd;  // decoder
  netcore::DenseNet e;   // second encoder
  netcore::DenseNet d;   // discriminator
  LatentStats latent;
  std::optional<ScoreNorm> score_norm;
  std::size_t trained_epochs = 0;

  static GanomalyModel create(const GanomalyConfig& config, std::uint64_t seed);

  // GE, GD, E, D tensors followed by latent mean and second-moment matrix.
  netcore::ModelWeights weights() const;
  void set_weights(const netcore::ModelWeights& weights);

  // Index of the discriminator's last hidden layer (feature-matching layer).
  std::size_t feature_layer() const { return d.layers().size() - 2; }
};

// Model bundle directory: ge.bin gd.bin e.bin d.bin (+ .json each) and
// manifest.json.
void save_bundle(const GanomalyModel& model, const std::filesystem::path& dir, const Json& extra = {});
GanomalyModel load_bundle(const std::filesystem::path& dir);
// Fingerprint of everything that defines the bundle's behaviour.
std::string bundle_fingerprint(const GanomalyModel& model);

}  // namespace ddoslab::ganomaly
