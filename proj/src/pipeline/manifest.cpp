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
#include "pipeline/manifest.hpp"

#include "common/error.hpp"
#include "common/sha256.hpp"

namespace ddoslab::pipeline {

Json RunManifest::to_json() const {
  return Json{{"command", command}, {"config", config},   {"seeds", seeds},         {"inputs", inputs},
              {"outputs", outputs}, {"version", version}, {"wall_time_s", wall_time_s}, {"timing", timing},
              {"output_fingerprint", output_fingerprint()}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config = j.value("config", Json::object());
    m.seeds = j.value("seeds", std::map<std::string, std::uint64_t>{});
    m.inputs = j.value("inputs", std::map<std::string, std::string>{});
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.version = j.value("version", std::string{});
    m.wall_time_s = j.value("wall_time_s", 0.0);
    m.timing = j.value("timing", Json::object());
  } catch (const Json::exception& e) {
    fail(ErrorKind::data, std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

std::string RunManifest::output_fingerprint() const {
  Sha256 h;
  h.update("ddoslab.outputs.v1");
  for (const auto& [path, digest] : outputs) {
    h.update(path);
    h.update(std::string_view("\0", 1));
    h.update(digest);
  }
  return h.hex_digest();
}

std::map<std::string, std::string> fingerprint_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  if (!std::filesystem::exists(dir)) return out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir).generic_string();
    if (rel == kManifestFile) continue;
    out[rel] = sha256_file(entry.path());
  }
  return out;
}

void write_manifest(const std::filesystem::path& out_dir, RunManifest& manifest) {
  manifest.outputs = fingerprint_tree(out_dir);
  write_json_file(out_dir / kManifestFile, manifest.to_json());
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestFile;
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::data, "no run manifest at " + path.string() + "; produce this input with the matching command");
  }
  return RunManifest::from_json(read_json_file(path));
}

std::string verify_stage(const std::filesystem::path& dir, const std::string& what) {
  const auto manifest = read_manifest(dir);
  const auto now = fingerprint_tree(dir);
  std::vector<std::string> diff;
  for (const auto& [path, digest] : manifest.outputs) {
    auto it = now.find(path);
    if (it == now.end()) {
      diff.push_back("missing " + path);
    } else if (it->second != digest) {
      diff.push_back("changed " + path);
    }
  }
  for (const auto& [path, _] : now) {
    if (!manifest.outputs.count(path)) diff.push_back("unexpected " + path);
  }
  if (!diff.empty()) {
    std::string summary;
    const std::size_t shown = std::min<std::size_t>(diff.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) summary += "\n  " + diff[i];
    if (diff.size() > shown) summary += "\n  ... " + std::to_string(diff.size() - shown) + " more";
    fail(ErrorKind::data, "stale " + what + " at " + dir.string() + " (does not match its " + manifest.command +
                              " manifest):" + summary);
  }
  return manifest.output_fingerprint();
}

}  // namespace ddoslab::pipeline
