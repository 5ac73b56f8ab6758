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
#include <span>
#include <string>
#include <vector>

#include "netcore/dense_net.hpp"

namespace ddoslab::netcore {

struct Tensor {
  std::vector<std::uint64_t> shape;
  std::vector<double> values;

  bool operator==(const Tensor&) const = default;
};

// Ordered flat list of tensors. For a DenseNet: W0, b0, W1, b1, ...
struct ModelWeights {
  std::vector<Tensor> tensors;

  bool operator==(const ModelWeights&) const = default;
  std::vector<std::vector<std::uint64_t>> shapes() const;
};

ModelWeights serialize_weights(const DenseNet& net);
DenseNet deserialize_weights(const ModelWeights& weights, const Architecture& arch, const std::string& name,
                             std::uint64_t seed = 0);

// Overwrites the parameters of net in place (keeps name, seed; bumps generation).
void load_into(DenseNet& net, std::span<const Tensor> tensors);

ModelWeights concat(const std::vector<ModelWeights>& parts);

// Binary container, little-endian:
//   "DDLW" | u32 version | u32 tensor count |
//   per tensor: u32 rank | u64 dims[rank] | f64 values[prod(dims)]
inline constexpr std::uint32_t kWeightsFormatVersion = 1;
std::vector<std::uint8_t> encode_weights(const ModelWeights& weights);
ModelWeights decode_weights(std::span<const std::uint8_t> bytes);

std::string weights_fingerprint(const ModelWeights& weights);

// Writes <path> (binary) and <path>.json (architecture, seed, fingerprint).
void save_net(const DenseNet& net, const std::filesystem::path& path, const Json& extra = {});
DenseNet load_net(const std::filesystem::path& path);

}  // namespace ddoslab::netcore
