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
#include <optional>
#include <string>

#include "common/json_io.hpp"

namespace ddoslab::pipeline {

inline constexpr const char* kManifestFile = "manifest.json";

// Record of one command run. Output fingerprints cover every file the command
// wrote under its output directory except the manifest itself; timing lives
// only here so that outputs stay byte-stable across reruns.
struct RunManifest {
  std::string command;
  Json config;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;   // label -> SHA-256
  std::map<std::string, std::string> outputs;  // path relative to out dir -> SHA-256
  std::string version;
  double wall_time_s = 0.0;
  Json timing = Json::object();

  Json to_json() const;
  static RunManifest from_json(const Json& j);

  // Digest of the output map alone, used as the stage fingerprint by
  // downstream commands.
  std::string output_fingerprint() const;
};

// SHA-256 of every regular file below dir (relative paths, sorted), skipping
// the manifest.
std::map<std::string, std::string> fingerprint_tree(const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& out_dir, RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& dir);

// Re-hashes the outputs listed in dir/manifest.json and refuses with a diff
// summary when anything changed. Returns the stage fingerprint.
std::string verify_stage(const std::filesystem::path& dir, const std::string& what);

}  // namespace ddoslab::pipeline
