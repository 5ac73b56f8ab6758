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
// Command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ddoslab/ddoslab.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string log_level = "info";
  std::string bind;
  std::string server;
  std::string models;
  std::string datasets;
  std::string preset;
};

struct Leaf {
  CLI::App* app;
  std::string command;
};

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "JSON config file; relative paths inside resolve against its directory");
  if (config_required) c->required();
  sub->add_option("--seed", f.seed, "Seed overriding the config and the ANOMALY_FLOW_SEED environment variable");
  sub->add_option("--out", f.out, "Output directory (replaced on every run); overrides the config");
  sub->add_option("--log-level", f.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddoslab: federated GANomaly DDoS detection lab"};
  app.set_version_flag("--version", std::string(ddl_version()));
  app.require_subcommand(1);
  Flags f;
  std::vector<Leaf> leaves;

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& command,
                  bool config_required = true) {
    auto* sub = parent->add_subcommand(name, help);
    add_common(sub, f, config_required);
    leaves.push_back({sub, command});
    return sub;
  };

  leaf(&app, "maketoy", "Write the Gaussian-mixture toy benchmark (raw CSVs, schema, stage configs)", "maketoy", false)
      ->add_option("--preset", f.preset, "Toy preset JSON (default: bundled toy_v2)");
  leaf(&app, "preprocess", "Load, clean and split NetFlow CSVs into per-domain train/validation/test sets",
       "preprocess");
  leaf(&app, "train-local", "Train and calibrate a GANomaly detector on one silo", "train-local");

  auto* fed = app.add_subcommand("federate", "Federated GANomaly training (FedAvg)");
  fed->require_subcommand(1);
  leaf(fed, "simulate", "Run all clients in process and calibrate the global model per silo", "federate simulate");
  leaf(fed, "serve", "Coordinate a federation over TCP", "federate serve")
      ->add_option("--bind", f.bind, "Listen address host:port (port 0 picks a free port)");
  leaf(fed, "client", "Join a federation over TCP as one silo", "federate client")
      ->add_option("--server", f.server, "Coordinator address host:port");

  leaf(&app, "generate", "Sample synthetic benign flows from a trained generator and audit them", "generate");
  leaf(&app, "audit", "Check a processed CSV against the schema's semantic value ranges", "audit");
  auto* cross = leaf(&app, "crosseval", "Evaluate every model on every domain's test split", "crosseval", false);
  cross->add_option("--models", f.models, "Directory of model directories (train-local / federate outputs)");
  cross->add_option("--datasets", f.datasets, "Preprocessed splits directory");

  auto* ext = app.add_subcommand("external", "External models trained on synthetic flows");
  ext->require_subcommand(1);
  leaf(ext, "pretrain", "Fit an isolation forest or MLP on a synthetic bundle", "external pretrain");
  leaf(ext, "finetune", "Incrementally update an external model on labeled local data", "external finetune");
  leaf(ext, "eval", "Evaluate an external model on its own and foreign test sets", "external eval");
  leaf(&app, "report", "Summarise cross-evaluation and external results", "report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : DDL_CONFIG_ERROR;
  }

  ddl_set_log_level(f.log_level.c_str());
  ddl_cmd_options opts;
  ddl_cmd_options_init(&opts);
  auto c_str = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
  opts.config = c_str(f.config);
  opts.out = c_str(f.out);
  opts.has_seed = f.seed.has_value();
  opts.seed = f.seed.value_or(0);
  opts.bind = c_str(f.bind);
  opts.server = c_str(f.server);
  opts.models = c_str(f.models);
  opts.datasets = c_str(f.datasets);
  opts.preset = c_str(f.preset);

  for (const auto& l : leaves) {
    if (!l.app->parsed()) continue;
    const ddl_status st = ddl_cmd_run(l.command.c_str(), &opts);
    if (st != DDL_OK) {
      std::fprintf(stderr, "error: %s\n", ddl_last_error());
      return static_cast<int>(st);
    }
    std::printf("%s: done (outputs %s)\n", l.command.c_str(), ddl_cmd_last_fingerprint());
    return 0;
  }
  return DDL_ERROR;
}
