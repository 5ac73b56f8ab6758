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

#include <cstdlib>
#include <fstream>
#include <map>

#include "common/error.hpp"
#include "common/sha256.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/manifest.hpp"

using namespace ddoslab;
using namespace ddoslab::pipeline;
namespace fs = std::filesystem;
using testutil::TempDir;

namespace {

testutil::QuietLogs quiet;

// A toy workspace: <root>/toy holds raw data and configs, stages write
// next to it.
struct Workspace {
  TempDir dir{"pipeline"};
  fs::path toy = dir / "toy";
  fs::path configs = toy / "configs";

  Workspace() {
    CommandOptions o;
    o.out = toy;
    o.seed = 3;
    run_command("maketoy", o);
  }

  RunManifest run(const std::string& cmd, const std::string& config, std::optional<std::uint64_t> seed = {}) const {
    CommandOptions o;
    o.config = configs / config;
    o.seed = seed;
    return run_command(cmd, o);
  }

  // Rewrites keys of a stage config in place.
  void patch(const std::string& config, const Json& changes) const {
    auto doc = read_json_file(configs / config);
    doc.update(changes);
    write_json_file(configs / config, doc);
  }
};

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = sha256_file(e.path());
  return out;
}

struct ScopedEnv {
  ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~ScopedEnv() { ::unsetenv(name_); }
  const char* name_;
};

}  // namespace

TEST_CASE("command names cover every pipeline stage") {
  const auto& names = command_names();
  for (const char* n : {"preprocess", "train-local", "federate simulate", "federate serve", "federate client", "generate",
                        "audit", "crosseval", "external pretrain", "external finetune", "external eval", "maketoy",
                        "report"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(run_command("bogus", {}), Error);
}

TEST_CASE("seed precedence: flag, then environment, then config") {
  const Json cfg{{"seed", 3}};
  CHECK(resolve_seed(cfg, std::nullopt) == 3);
  CHECK(resolve_seed(Json::object(), std::nullopt) == 0);
  ScopedEnv env(kSeedEnv, "11");
  CHECK(resolve_seed(cfg, std::nullopt) == 11);
  CHECK(resolve_seed(cfg, 9) == 9);
}

TEST_CASE("preprocess writes splits, provenance and a manifest, reproducibly") {
  Workspace ws;
  auto m1 = ws.run("preprocess", "preprocess.json");
  const auto splits = ws.dir / "splits";
  for (const char* d : {"A", "B", "C", "X"})
    for (const char* f : {"train.csv", "validation.csv", "test.csv", "provenance.json"})
      CHECK(fs::exists(splits / d / f));
  CHECK(fs::exists(splits / kManifestFile));
  CHECK(m1.outputs.count("A/train.csv") == 1);
  CHECK(m1.outputs.count(kManifestFile) == 0);
  CHECK(read_manifest(splits).output_fingerprint() == m1.output_fingerprint());

  auto m2 = ws.run("preprocess", "preprocess.json");
  CHECK(m2.outputs == m1.outputs);
  CHECK(m2.output_fingerprint() == m1.output_fingerprint());

  auto m3 = ws.run("preprocess", "preprocess.json", 4);
  CHECK(m3.output_fingerprint() != m1.output_fingerprint());
}

TEST_CASE("environment seed overrides the config seed") {
  Workspace ws;
  auto base = ws.run("preprocess", "preprocess.json");
  {
    ScopedEnv env(kSeedEnv, "77");
    auto env_run = ws.run("preprocess", "preprocess.json");
    CHECK(env_run.seeds.at("split") == 77);
    CHECK(env_run.output_fingerprint() != base.output_fingerprint());
  }
  CHECK(ws.run("preprocess", "preprocess.json", 77).output_fingerprint() ==
        [&] {
          ScopedEnv env(kSeedEnv, "77");
          return ws.run("preprocess", "preprocess.json").output_fingerprint();
        }());
}

TEST_CASE("missing input file is a data error naming the path") {
  Workspace ws;
  ws.patch("preprocess.json", Json{{"datasets", {{"A", "../raw/missing.csv"}}}});
  try {
    ws.run("preprocess", "preprocess.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::data || e.kind() == ErrorKind::io));
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }
}

TEST_CASE("stale upstream outputs are refused with a diff summary") {
  Workspace ws;
  ws.run("preprocess", "preprocess.json");
  ws.patch("train_local_A.json", Json{{"epochs", 1}});
  ws.run("train-local", "train_local_A.json");
  {
    std::ofstream tamper(ws.dir / "splits" / "A" / "train.csv", std::ios::app);
    tamper << "0,0,0,0,0,0,0,0,0,0,0,0,0,0,benign\n";
  }
  try {
    ws.run("train-local", "train_local_A.json");
    FAIL("expected stale-stage refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("A/train.csv") != std::string::npos);
  }
}

TEST_CASE("a command writes only inside its output directory") {
  Workspace ws;
  ws.run("preprocess", "preprocess.json");
  const auto before = snapshot(ws.dir.path());
  ws.patch("train_local_B.json", Json{{"epochs", 1}});
  const auto patched = snapshot(ws.dir.path());
  ws.run("train-local", "train_local_B.json");
  const auto after = snapshot(ws.dir.path());
  for (const auto& [path, hash] : after) {
    if (path.rfind("models/local_B/", 0) == 0) continue;
    REQUIRE(patched.count(path) == 1);
    CHECK(patched.at(path) == hash);
  }
  CHECK(before.size() == patched.size());
}

TEST_CASE("crosseval over three locals and the federated model has twelve cells") {
  Workspace ws;
  ws.run("preprocess", "preprocess.json");
  for (const char* s : {"A", "B", "C"}) {
    const std::string cfg = std::string("train_local_") + s + ".json";
    ws.patch(cfg, Json{{"epochs", 1}});
    ws.run("train-local", cfg);
  }
  ws.patch("federate.json", Json{{"rounds", 1}, {"local_epochs", 1}});
  auto fl = ws.run("federate simulate", "federate.json");
  CHECK(fs::exists(ws.dir / "models" / "fl" / "rounds.json"));
  CHECK(fl.outputs.count("model/manifest.json") == 1);
  ws.run("crosseval", "crosseval.json");
  auto report = read_json_file(ws.dir / "crosseval" / "report.json");
  const auto cells = report.at("cells").size();
  CHECK(report.at("models").size() == 4);
  CHECK(report.at("datasets").size() == 3);
  CHECK(cells == 12);
  CHECK(fs::exists(ws.dir / "crosseval" / "report.txt"));
}
