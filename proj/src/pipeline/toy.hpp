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
#include <map>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "flowdata/schema.hpp"

namespace ddoslab::pipeline {

// Versioned description of the Gaussian-mixture benchmark: a raw NetFlow-like
// schema, a shared DDoS mixture and per-domain benign mixtures.
struct ToyPreset {
  Json doc;

  static ToyPreset load(const std::filesystem::path& path);
  static std::filesystem::path default_path();

  std::string name() const;
  flowdata::FlowSchema schema() const;
  std::vector<std::string> domains() const;
  bool labeled(const std::string& domain) const;
  double attack_train_fraction(const std::string& domain) const;
};

struct ToyOutput {
  std::filesystem::path schema_path;
  std::map<std::string, std::filesystem::path> csv;  // domain -> raw CSV
};

// Writes schema.json and raw/<domain>.csv under out_dir. Deterministic in
// (preset, seed).
ToyOutput make_toy(const ToyPreset& preset, std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace ddoslab::pipeline
