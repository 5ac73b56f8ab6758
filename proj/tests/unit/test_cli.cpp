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

// Runs the installed command-line tool as a subprocess.
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DDOSLAB_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.output += buf.data();
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("ddoslab_cli_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("--help documents every flag of every subcommand") {
  struct Case {
    std::string command;
    std::vector<std::string> extra;
  };
  const std::vector<Case> cases = {
      {"maketoy", {"--preset"}},
      {"preprocess", {}},
      {"train-local", {}},
      {"federate simulate", {}},
      {"federate serve", {"--bind"}},
      {"federate client", {"--server"}},
      {"generate", {}},
      {"audit", {}},
      {"crosseval", {"--models", "--datasets"}},
      {"external pretrain", {}},
      {"external finetune", {}},
      {"external eval", {}},
      {"report", {}},
  };
  for (const auto& c : cases) {
    auto r = run(c.command + " --help");
    INFO(c.command);
    CHECK(r.code == 0);
    for (const char* flag : {"--config", "--seed", "--out", "--log-level"}) CHECK(r.output.find(flag) != std::string::npos);
    for (const auto& flag : c.extra) CHECK(r.output.find(flag) != std::string::npos);
  }
  auto top = run("--help");
  CHECK(top.code == 0);
  for (const char* sub : {"preprocess", "train-local", "federate", "generate", "audit", "crosseval", "external",
                          "maketoy", "report"})
    CHECK(top.output.find(sub) != std::string::npos);
}

TEST_CASE("exit codes: 2 for configuration problems, 3 for data problems") {
  CHECK(run("preprocess").code == 2);
  CHECK(run("preprocess --config /nonexistent/cfg.json").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("preprocess --config x.json --log-level loud").code == 2);

  Scratch s;
  const auto toy = s.path / "toy";
  auto made = run("maketoy --out " + toy.string() + " --seed 1 --log-level error");
  REQUIRE(made.code == 0);
  CHECK(made.output.find("maketoy: done") != std::string::npos);
  fs::remove(toy / "raw" / "B.csv");
  auto r = run("preprocess --config " + (toy / "configs" / "preprocess.json").string() + " --log-level error");
  CHECK(r.code == 3);
  CHECK(r.output.find("B.csv") != std::string::npos);

  {
    std::ofstream bad(s.path / "bad.json");
    bad << "{ not json";
  }
  CHECK(run("preprocess --config " + (s.path / "bad.json").string()).code == 2);
}
