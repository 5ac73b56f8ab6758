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
#include "pipeline/manifest.hpp"

namespace ddoslab::pipeline {

inline constexpr const char* kSeedEnv = "ANOMALY_FLOW_SEED";

struct CommandOptions {
  std::filesystem::path config;  // JSON config; relative paths inside resolve against its directory
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;     // overrides the config's output directory
  std::string bind;              // federate serve
  std::string server;            // federate client
  std::filesystem::path models;  // crosseval
  std::filesystem::path datasets;
  std::filesystem::path preset;  // maketoy
};

// --seed, then ANOMALY_FLOW_SEED, then the config's "seed", then 0.
std::uint64_t resolve_seed(const Json& config, const std::optional<std::uint64_t>& cli_seed);

// Names accepted by run_command, e.g. "preprocess" or "federate simulate".
const std::vector<std::string>& command_names();

// Runs one pipeline command and returns the manifest it wrote into its output
// directory.
RunManifest run_command(const std::string& name, const CommandOptions& options);

}  // namespace ddoslab::pipeline
