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
#include "pipeline/commands.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/sha256.hpp"
#include "evalkit/evaluate.hpp"
#include "extmodels/external_model.hpp"
#include "federation/simulation.hpp"
#include "federation/wire.hpp"
#include "flowdata/csv.hpp"
#include "flowdata/preprocess.hpp"
#include "ganomaly/detector.hpp"
#include "ganomaly/synthetic.hpp"
#include "pipeline/toy.hpp"

namespace ddoslab::pipeline {
namespace fs = std::filesystem;
namespace {

struct Loaded {
  Json doc = Json::object();
  fs::path base;  // directory of the config file

  fs::path path(const std::string& key) const {
    require(doc.contains(key) && doc[key].is_string(), ErrorKind::config, "config: missing path '" + key + "'");
    return resolve(doc[key].get<std::string>());
  }
  fs::path resolve(const std::string& p) const {
    fs::path v(p);
    return v.is_absolute() ? v : (base / v).lexically_normal();
  }
  template <typename T>
  T get(const std::string& key, T fallback) const {
    try {
      return doc.value(key, fallback);
    } catch (const Json::exception& e) {
      fail(ErrorKind::config, "config key '" + key + "': " + e.what());
    }
  }
};

Loaded load_config(const CommandOptions& o, bool required = true) {
  Loaded c;
  if (o.config.empty()) {
    require(!required, ErrorKind::config, "--config is required for this command");
    c.base = fs::current_path();
    return c;
  }
  if (!fs::exists(o.config)) fail(ErrorKind::config, "config file not found: " + o.config.string());
  try {
    c.doc = Json::parse(read_text_file(o.config));
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, "config " + o.config.string() + ": " + e.what());
  }
  require(c.doc.is_object(), ErrorKind::config, "config " + o.config.string() + " must be a JSON object");
  c.base = fs::absolute(o.config).parent_path();
  return c;
}

fs::path output_dir(const CommandOptions& o, const Loaded& c, const std::string& key = "out") {
  if (!o.out.empty()) return o.out;
  if (c.doc.contains(key) && c.doc[key].is_string()) return c.resolve(c.doc[key].get<std::string>());
  fail(ErrorKind::config, "no output directory: pass --out or set '" + key + "' in the config");
}

// Every command starts from an empty output directory so that the manifest
// describes exactly what this run wrote.
void prepare_output(const fs::path& out) {
  if (fs::exists(out)) {
    require(fs::is_directory(out), ErrorKind::config, "output path " + out.string() + " is not a directory");
    fs::remove_all(out);
  }
  fs::create_directories(out);
}

ganomaly::GanomalyConfig model_config(const Loaded& c, std::size_t input_dim) {
  auto cfg = ganomaly::GanomalyConfig::from_json(c.doc.value("model", Json::object()), input_dim);
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return cfg;
}

double quantile_q(const Loaded& c) {
  const double q = c.get("q", 0.95);
  require(q > 0.0 && q < 1.0, ErrorKind::config, "config: q must lie in (0,1)");
  return q;
}

flowdata::FlowSchema load_schema(const Loaded& c) {
  const auto p = c.path("schema");
  if (!fs::exists(p)) fail(ErrorKind::config, "schema file not found: " + p.string());
  try {
    return flowdata::FlowSchema::from_json(read_json_file(p));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(ErrorKind::config, "schema " + p.string() + ": " + e.what());
  }
}

void require_columns(const flowdata::FlowTable& t, const std::vector<std::string>& expected, const std::string& what) {
  if (t.column_names() != expected) {
    fail(ErrorKind::data, what + ": columns do not match the schema's processed columns");
  }
}

struct Run {
  RunManifest manifest;
  fs::path out;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Run(const std::string& command, const Loaded& c, fs::path out_dir) : out(std::move(out_dir)) {
    manifest.command = command;
    manifest.config = c.doc;
    manifest.version = DDOSLAB_VERSION;
    prepare_output(out);
  }
  void input_file(const std::string& label, const fs::path& p) {
    if (!fs::exists(p)) fail(ErrorKind::data, "input file not found: " + p.string());
    manifest.inputs[label] = sha256_file(p);
  }
  void input_stage(const std::string& label, const fs::path& dir) { manifest.inputs[label] = verify_stage(dir, label); }
  RunManifest finish() {
    manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out, manifest);
    spdlog::info("{}: wrote {} file(s) to {}", manifest.command, manifest.outputs.size(), out.string());
    return manifest;
  }
};

// ---- models on disk -------------------------------------------------------
// <dir>/model/ holds the bundle, <dir>/calibration/<silo>.json one calibration
// per silo that holds the model.

void save_calibration(const fs::path& dir, const std::string& silo, const ganomaly::Calibration& cal) {
  fs::create_directories(dir / "calibration");
  write_json_file(dir / "calibration" / (silo + ".json"), cal.to_json());
}

std::map<std::string, ganomaly::Calibration> load_calibrations(const fs::path& dir) {
  std::map<std::string, ganomaly::Calibration> out;
  const auto cdir = dir / "calibration";
  if (!fs::exists(cdir)) return out;
  for (const auto& e : fs::directory_iterator(cdir)) {
    if (e.path().extension() != ".json") continue;
    out.emplace(e.path().stem().string(), ganomaly::Calibration::from_json(read_json_file(e.path())));
  }
  return out;
}

ganomaly::Calibration calibrate_for(const ganomaly::GanomalyModel& model, const flowdata::ScalerParams& scaler,
                                    const flowdata::FlowTable& validation, double q) {
  ganomaly::GanomalyDetector det(model, scaler);
  return ganomaly::calibrate(det, validation, q);
}

// ---- commands ---------------------------------------------------------------

RunManifest cmd_maketoy(const CommandOptions& o) {
  const auto c = load_config(o, false);
  fs::path preset_path = !o.preset.empty() ? o.preset
                         : c.doc.contains("preset") ? c.path("preset")
                                                    : ToyPreset::default_path();
  if (!fs::exists(preset_path)) fail(ErrorKind::config, "preset not found: " + preset_path.string());
  const auto preset = ToyPreset::load(preset_path);
  const auto seed = resolve_seed(c.doc, o.seed);
  fs::path out = !o.out.empty() ? o.out : c.doc.contains("out") ? c.path("out") : fs::path("toy");
  Run run("maketoy", c, out);
  run.input_file("preset", preset_path);
  run.manifest.seeds["seed"] = seed;
  make_toy(preset, seed, out);
  write_json_file(out / "preset.json", preset.doc);

  // Ready-made stage configs. Paths are relative to configs/; stage outputs go
  // next to the toy directory.
  const Json& p = preset.doc.at("pipeline");
  const auto silos = p.at("silos").get<std::vector<std::string>>();
  const std::string ext = p.at("external_domain").get<std::string>();
  Json datasets = Json::object();
  Json labeled = Json::object();
  for (const auto& d : preset.domains()) {
    datasets[d] = "../raw/" + d + ".csv";
    if (preset.labeled(d)) labeled[d] = preset.attack_train_fraction(d);
  }
  const auto cfg = out / "configs";
  fs::create_directories(cfg);
  write_json_file(cfg / "preprocess.json", Json{{"schema", "../schema.json"},
                                                {"datasets", datasets},
                                                {"labeled", labeled},
                                                {"iqr_k", 3.0},
                                                {"seed", seed},
                                                {"out", "../../splits"}});
  for (const auto& s : silos) {
    write_json_file(cfg / ("train_local_" + s + ".json"), Json{{"data", "../../splits"},
                                                              {"schema", "../schema.json"},
                                                              {"silo", s},
                                                              {"model", p.at("model")},
                                                              {"epochs", p.at("local_epochs")},
                                                              {"q", p.at("q")},
                                                              {"seed", seed},
                                                              {"out", "../../models/local_" + s}});
  }
  write_json_file(cfg / "federate.json", Json{{"data", "../../splits"},
                                              {"schema", "../schema.json"},
                                              {"clients", silos},
                                              {"rounds", p.at("rounds")},
                                              {"local_epochs", p.at("local_epochs")},
                                              {"weighting", "samples"},
                                              {"model", p.at("model")},
                                              {"q", p.at("q")},
                                              {"seed", seed},
                                              {"join_timeout_s", 60.0},
                                              {"round_timeout_s", 600.0},
                                              {"min_quorum", 1},
                                              {"out", "../../models/fl"}});
  for (const auto& s : silos) {
    write_json_file(cfg / ("federate_client_" + s + ".json"), Json{{"data", "../../splits"},
                                                                  {"schema", "../schema.json"},
                                                                  {"silo", s},
                                                                  {"model", p.at("model")},
                                                                  {"q", p.at("q")},
                                                                  {"out", "../../wire/client_" + s}});
  }
  write_json_file(cfg / "generate.json", Json{{"model", "../../models/fl"},
                                              {"data", "../../splits"},
                                              {"schema", "../schema.json"},
                                              {"scaler_silo", p.at("synthetic_scaler_silo")},
                                              {"n", p.at("synthetic_rows")},
                                              {"seed", seed},
                                              {"out", "../../synthetic"}});
  write_json_file(cfg / "audit.json", Json{{"input", "../../synthetic/synthetic.csv"},
                                           {"schema", "../schema.json"},
                                           {"out", "../../audit"}});
  write_json_file(cfg / "crosseval.json", Json{{"models", "../../models"},
                                               {"datasets", "../../splits"},
                                               {"domains", silos},
                                               {"out", "../../crosseval"}});
  Json ext_cfg = p.at("external");
  ext_cfg["bundle"] = "../../synthetic";
  ext_cfg["data"] = "../../splits";
  ext_cfg["domain"] = ext;
  Json eval_domains = Json::array({ext});
  for (const auto& s : silos) eval_domains.push_back(s);
  ext_cfg["eval_domains"] = eval_domains;
  ext_cfg["seed"] = seed;
  ext_cfg["out"] = {{"pretrain", "../../external/pretrained"},
                    {"finetune", "../../external/finetuned"},
                    {"eval", "../../external/eval"}};
  write_json_file(cfg / "external.json", ext_cfg);
  write_json_file(cfg / "report.json", Json{{"crosseval", "../../crosseval"},
                                            {"external", "../../external/eval"},
                                            {"out", "../../report"}});
  return run.finish();
}

RunManifest cmd_preprocess(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto schema = load_schema(c);
  const auto seed = resolve_seed(c.doc, o.seed);
  require(c.doc.contains("datasets") && c.doc["datasets"].is_object() && !c.doc["datasets"].empty(),
          ErrorKind::config, "preprocess: 'datasets' must map domain names to CSV paths");
  flowdata::CleanOptions clean;
  clean.iqr_k = c.get("iqr_k", 3.0);
  require(clean.iqr_k > 0.0, ErrorKind::config, "preprocess: iqr_k must be positive");
  const Json labeled = c.doc.value("labeled", Json::object());

  Run run("preprocess", c, output_dir(o, c));
  run.manifest.seeds["split"] = seed;
  run.input_file("schema", c.path("schema"));
  for (const auto& [domain, p] : c.doc["datasets"].items()) {
    require(p.is_string(), ErrorKind::config, "preprocess: dataset path for '" + domain + "' must be a string");
    const auto csv = c.resolve(p.get<std::string>());
    run.input_file("dataset:" + domain, csv);
    auto raw = flowdata::load_csv(csv, schema);
    auto table = flowdata::preprocess(raw, schema, clean);
    // Every domain draws its own split stream.
    const auto domain_seed = derive_seed(seed, "preprocess." + domain, 0);
    auto set = labeled.contains(domain) ? flowdata::split_labeled(table, domain_seed, labeled[domain].get<double>())
                                        : flowdata::split(table, domain_seed);
    flowdata::write_split_set(set, run.out / domain, Json{{"domain", domain}, {"seed", seed}});
    spdlog::info("preprocess {}: train {} validation {} test {} ({} ddos)", domain, set.train.rows(),
                 set.validation.rows(), set.test.rows(), set.test.count(flowdata::Label::ddos));
  }
  return run.finish();
}

flowdata::SplitSet load_silo(const fs::path& data, const std::string& silo) {
  const auto dir = data / silo;
  if (!fs::exists(dir / "provenance.json")) fail(ErrorKind::data, "no split for silo '" + silo + "' under " + data.string());
  return flowdata::read_split_set(dir);
}

RunManifest cmd_train_local(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto data = c.path("data");
  const auto silo = c.get<std::string>("silo", "");
  require(!silo.empty(), ErrorKind::config, "train-local: 'silo' is required");
  const auto epochs = c.get<std::size_t>("epochs", 50);
  require(epochs >= 1, ErrorKind::config, "train-local: epochs must be at least 1");
  const auto seed = resolve_seed(c.doc, o.seed);
  const double q = quantile_q(c);

  Run run("train-local", c, output_dir(o, c));
  run.input_stage("splits", data);
  const auto split = load_silo(data, silo);
  if (c.doc.contains("schema")) require_columns(split.train, load_schema(c).processed_columns(), "silo " + silo);
  const auto cfg = model_config(c, split.train.cols());
  run.manifest.seeds["seed"] = seed;

  // Same start point and shuffling stream as a one-client, one-round federation.
  federation::LocalClient client(silo, split.train, cfg, seed);
  auto model = federation::initial_global(cfg, seed);
  auto update = client.train_round(model.weights(), 0, epochs);
  model.set_weights(update.weights);
  model.trained_epochs = epochs;

  ganomaly::save_bundle(model, run.out / "model", Json{{"silo", silo}});
  save_calibration(run.out, silo, calibrate_for(model, client.scaler(), split.validation, q));
  write_json_file(run.out / "training.json", Json{{"silo", silo}, {"epochs", epochs}, {"loss", update.loss.to_json()}});
  return run.finish();
}

federation::FLConfig fl_config(const Loaded& c, std::uint64_t seed, std::size_t input_dim,
                               const std::vector<std::string>& columns, const fs::path& data) {
  federation::FLConfig fl;
  fl.rounds = c.get<std::size_t>("rounds", 10);
  fl.local_epochs = c.get<std::size_t>("local_epochs", 50);
  fl.weighting = federation::weighting_from_string(c.get<std::string>("weighting", "samples"));
  fl.seed = seed;
  fl.model = model_config(c, input_dim);
  fl.columns = columns;
  fl.join_timeout_s = c.get("join_timeout_s", fl.join_timeout_s);
  fl.round_timeout_s = c.get("round_timeout_s", fl.round_timeout_s);
  fl.min_quorum = c.get<std::size_t>("min_quorum", 1);
  for (const auto& id : c.get("clients", std::vector<std::string>{})) fl.clients.push_back({id, data / id});
  fl.validate();
  return fl;
}

Json round_logs(const std::vector<federation::RoundLog>& logs, Json& timing) {
  Json out = Json::array();
  timing["aggregation_ms"] = Json::array();
  for (const auto& l : logs) {
    Json j = l.to_json();
    timing["aggregation_ms"].push_back(j["aggregation_ms"]);
    j.erase("aggregation_ms");  // keeps rounds.json byte-stable
    out.push_back(j);
  }
  return out;
}

RunManifest cmd_federate_simulate(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto data = c.path("data");
  const auto schema = load_schema(c);
  const auto columns = schema.processed_columns();
  const auto seed = resolve_seed(c.doc, o.seed);
  const double q = quantile_q(c);
  const auto fl = fl_config(c, seed, columns.size(), columns, data);

  Run run("federate simulate", c, output_dir(o, c));
  run.input_stage("splits", data);
  run.manifest.seeds["seed"] = seed;
  std::vector<std::unique_ptr<federation::LocalClient>> owned;
  std::vector<federation::ClientEndpoint*> clients;
  std::map<std::string, flowdata::FlowTable> validation;
  for (const auto& spec : fl.clients) {
    auto split = load_silo(data, spec.id);
    require_columns(split.train, columns, "silo " + spec.id);
    owned.push_back(std::make_unique<federation::LocalClient>(spec.id, split.train, fl.model, seed));
    clients.push_back(owned.back().get());
    validation.emplace(spec.id, split.validation);
  }
  auto result = federation::run_federation(fl, clients);
  ganomaly::save_bundle(result.model, run.out / "model", Json{{"federated", true}, {"rounds", fl.rounds}});
  for (const auto& client : owned) {
    save_calibration(run.out, client->id(), calibrate_for(result.model, client->scaler(), validation.at(client->id()), q));
  }
  write_json_file(run.out / "rounds.json", round_logs(result.logs, run.manifest.timing));
  return run.finish();
}

RunManifest cmd_federate_serve(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto schema = load_schema(c);
  const auto columns = schema.processed_columns();
  const auto seed = resolve_seed(c.doc, o.seed);
  const auto fl = fl_config(c, seed, columns.size(), columns, fs::path());
  const std::string bind = !o.bind.empty() ? o.bind : c.get<std::string>("bind", "");
  require(!bind.empty(), ErrorKind::config, "federate serve: pass --bind host:port");

  Run run("federate serve", c, output_dir(o, c));
  run.manifest.seeds["seed"] = seed;
  federation::WireServer server(fl);
  server.bind(federation::parse_endpoint(bind));
  auto result = server.run();
  ganomaly::save_bundle(result.model, run.out / "model", Json{{"federated", true}, {"rounds", fl.rounds}});
  write_json_file(run.out / "rounds.json", round_logs(result.logs, run.manifest.timing));
  return run.finish();
}

RunManifest cmd_federate_client(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto data = c.path("data");
  const auto schema = load_schema(c);
  const auto columns = schema.processed_columns();
  const auto silo = c.get<std::string>("silo", "");
  require(!silo.empty(), ErrorKind::config, "federate client: 'silo' is required");
  const std::string server = !o.server.empty() ? o.server : c.get<std::string>("server", "");
  require(!server.empty(), ErrorKind::config, "federate client: pass --server host:port");
  const double q = quantile_q(c);

  Run run("federate client", c, output_dir(o, c));
  run.input_stage("splits", data);
  const auto split = load_silo(data, silo);
  require_columns(split.train, columns, "silo " + silo);
  const auto cfg = model_config(c, columns.size());
  federation::LocalClient client(silo, split.train, cfg, 0);
  federation::WireClientOptions wopts;
  wopts.connect_timeout_s = c.get("connect_timeout_s", wopts.connect_timeout_s);
  auto result = federation::run_wire_client(federation::parse_endpoint(server), client, cfg, columns, wopts);
  ganomaly::save_bundle(result.model, run.out / "model", Json{{"federated", true}});
  save_calibration(run.out, silo, calibrate_for(result.model, client.scaler(), split.validation, q));
  Json losses = Json::array();
  for (const auto& l : result.round_losses) losses.push_back(l.to_json());
  write_json_file(run.out / "training.json", Json{{"silo", silo}, {"round_losses", losses}});
  return run.finish();
}

RunManifest cmd_generate(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto model_dir = c.path("model");
  const auto data = c.path("data");
  const auto schema = load_schema(c);
  const auto silo = c.get<std::string>("scaler_silo", "");
  require(!silo.empty(), ErrorKind::config, "generate: 'scaler_silo' names whose scaler maps samples to feature units");
  const auto n = c.get<std::size_t>("n", 100000);
  require(n >= 1, ErrorKind::config, "generate: n must be at least 1");
  const auto seed = resolve_seed(c.doc, o.seed);

  Run run("generate", c, output_dir(o, c));
  run.input_stage("model", model_dir);
  run.input_stage("splits", data);
  run.manifest.seeds["seed"] = seed;
  const auto model = ganomaly::load_bundle(model_dir / "model");
  const auto cals = load_calibrations(model_dir);
  auto it = cals.find(silo);
  if (it == cals.end()) fail(ErrorKind::data, "generate: model at " + model_dir.string() + " has no calibration for '" + silo + "'");
  const auto& scaler = it->second.scaler;
  const auto reference = load_silo(data, silo).train;

  Rng rng(derive_seed(seed, "generate", 0));
  auto table = ganomaly::generate_synthetic(model, n, rng, scaler);
  const auto ranges = ganomaly::processed_ranges(schema);
  ganomaly::AuditOptions aopts;
  aopts.reference = &reference;
  aopts.scaler = &scaler;
  auto audit = ganomaly::audit_synthetic(table, ranges, aopts);
  if (c.get("filter_violations", false)) {
    table = ganomaly::filter_violations(table, ranges);
    spdlog::info("generate: kept {} of {} rows after filtering", table.rows(), audit.rows);
  }
  extmodels::SyntheticBundle{table, audit, ganomaly::bundle_fingerprint(model)}.save(run.out);
  spdlog::info("generate: {} rows, violation ratio {:.4f}", table.rows(), audit.violation_ratio());
  return run.finish();
}

RunManifest cmd_audit(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto input = c.path("input");
  const auto schema = load_schema(c);
  Run run("audit", c, output_dir(o, c));
  run.input_file("input", input);
  const auto table = flowdata::read_table_csv(input);
  const auto ranges = ganomaly::processed_ranges(schema);
  const auto report = ganomaly::audit_synthetic(table, ranges);
  write_json_file(run.out / "audit.json", report.to_json());
  if (c.get("write_filtered", false)) {
    flowdata::write_table_csv(ganomaly::filter_violations(table, ranges), run.out / "filtered.csv");
  }
  spdlog::info("audit: {} of {} rows violate a range rule", report.rows_with_violations, report.rows);
  return run.finish();
}

RunManifest cmd_crosseval(const CommandOptions& o) {
  const auto c = load_config(o, false);
  const fs::path models = !o.models.empty() ? o.models : c.path("models");
  const fs::path datasets = !o.datasets.empty() ? o.datasets : c.path("datasets");
  Run run("crosseval", c, output_dir(o, c));
  run.input_stage("splits", datasets);

  std::vector<std::string> domains = c.get("domains", std::vector<std::string>{});
  if (domains.empty()) {
    for (const auto& e : fs::directory_iterator(datasets)) {
      if (e.is_directory() && fs::exists(e.path() / "test.csv")) domains.push_back(e.path().filename().string());
    }
    std::sort(domains.begin(), domains.end());
  }
  std::map<std::string, flowdata::FlowTable> tests;
  for (const auto& d : domains) tests.emplace(d, load_silo(datasets, d).test);

  if (!fs::is_directory(models)) fail(ErrorKind::data, "models directory not found: " + models.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(models)) {
    if (e.is_directory() && fs::exists(e.path() / "model" / "manifest.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  require(!dirs.empty(), ErrorKind::data, "crosseval: no model directories under " + models.string());
  std::vector<evalkit::ModelRow> rows;
  for (const auto& dir : dirs) {
    const auto id = dir.filename().string();
    run.input_stage("model:" + id, dir);
    const auto model = ganomaly::load_bundle(dir / "model");
    const auto cals = load_calibrations(dir);
    require(!cals.empty(), ErrorKind::data, "crosseval: model " + id + " has no calibration");
    evalkit::ModelRow row{id, cals.size() > 1, {}};
    for (const auto& [silo, cal] : cals) {
      row.detectors.push_back({silo, ganomaly::make_detector(model, cal), cal.threshold.threshold, cal.validation_scores});
    }
    rows.push_back(std::move(row));
  }
  const auto matrix = evalkit::cross_evaluate(rows, tests);
  write_json_file(run.out / "report.json", matrix.to_json());
  write_text_file(run.out / "report.txt", matrix.to_text());
  return run.finish();
}

Json external_out(const Loaded& c) { return c.doc.value("out", Json::object()); }

fs::path external_dir(const CommandOptions& o, const Loaded& c, const std::string& stage) {
  if (!o.out.empty()) return o.out;
  const Json out = external_out(c);
  if (out.is_object() && out.contains(stage)) return c.resolve(out[stage].get<std::string>());
  if (out.is_string()) return c.resolve(out.get<std::string>()) / stage;
  fail(ErrorKind::config, "external " + stage + ": pass --out or set out." + stage + " in the config");
}

// Input of a later external stage: explicit key, else the earlier stage's out.
fs::path external_input(const Loaded& c, const std::string& key, const std::string& stage) {
  if (c.doc.contains(key)) return c.path(key);
  const Json out = external_out(c);
  if (out.is_object() && out.contains(stage)) return c.resolve(out[stage].get<std::string>());
  if (out.is_string()) return c.resolve(out.get<std::string>()) / stage;
  fail(ErrorKind::config, "external: set '" + key + "' or out." + stage + " in the config");
}

RunManifest cmd_external_pretrain(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto kind = extmodels::external_kind_from_string(c.get<std::string>("kind", "mlp_classifier"));
  const auto bundle_dir = c.path("bundle");
  auto pcfg = extmodels::PretrainConfig::from_json(c.doc.value("pretrain", Json::object()));
  pcfg.seed = resolve_seed(c.doc, o.seed);

  Run run("external pretrain", c, external_dir(o, c, "pretrain"));
  run.input_stage("synthetic", bundle_dir);
  run.manifest.seeds["seed"] = pcfg.seed;
  const auto bundle = extmodels::SyntheticBundle::load(bundle_dir);
  const auto model = extmodels::pretrain(kind, bundle, pcfg);
  model.save(run.out / "model.ddlx");
  write_json_file(run.out / "model.json", Json{{"kind", extmodels::to_string(kind)},
                                               {"fingerprint", model.fingerprint()},
                                               {"threshold", model.threshold()},
                                               {"generator_fingerprint", bundle.generator_fingerprint}});
  return run.finish();
}

RunManifest cmd_external_finetune(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto model_dir = external_input(c, "pretrained", "pretrain");
  const auto data = c.path("data");
  const auto domain = c.get<std::string>("domain", "");
  require(!domain.empty(), ErrorKind::config, "external finetune: 'domain' is required");
  auto fcfg = extmodels::FineTuneConfig::from_json(c.doc.value("finetune", Json::object()));
  fcfg.seed = resolve_seed(c.doc, o.seed);

  Run run("external finetune", c, external_dir(o, c, "finetune"));
  run.input_stage("pretrained", model_dir);
  run.input_stage("splits", data);
  run.manifest.seeds["seed"] = fcfg.seed;
  const auto base = extmodels::ExternalModel::load(model_dir / "model.ddlx");
  const auto local = load_silo(data, domain).train;
  const auto model = extmodels::fine_tune(base, local, fcfg);
  model.save(run.out / "model.ddlx");
  Json log = Json::array();
  for (const auto& e : model.fine_tune_log()) {
    log.push_back({{"batch_size", e.batch_size}, {"batches", e.batches}, {"metric", e.metric}, {"value", e.value}});
  }
  write_json_file(run.out / "model.json", Json{{"kind", extmodels::to_string(model.kind())},
                                               {"fingerprint", model.fingerprint()},
                                               {"threshold", model.threshold()},
                                               {"domain", domain},
                                               {"fine_tune_log", log}});
  return run.finish();
}

RunManifest cmd_external_eval(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto model_dir = external_input(c, "finetuned", "finetune");
  const auto data = c.path("data");
  auto domains = c.get("eval_domains", std::vector<std::string>{});
  require(!domains.empty(), ErrorKind::config, "external eval: 'eval_domains' is required");

  Run run("external eval", c, external_dir(o, c, "eval"));
  run.input_stage("model", model_dir);
  run.input_stage("splits", data);
  const auto model = extmodels::ExternalModel::load(model_dir / "model.ddlx");
  std::map<std::string, flowdata::FlowTable> tests;
  for (const auto& d : domains) tests.emplace(d, load_silo(data, d).test);
  const auto id = std::string("external_") + extmodels::to_string(model.kind());
  const auto reports = extmodels::evaluate_unseen(model, id, tests);
  Json j = Json::object();
  std::ostringstream text;
  text << "External model " << id << " (threshold " << model.threshold() << ")\n";
  for (const auto& [d, r] : reports) {
    j[d] = r.to_json();
    text << "  " << d << ": F1 " << r.f1;
    if (r.roc_auc) text << "  ROC-AUC " << *r.roc_auc;
    text << "\n";
  }
  write_json_file(run.out / "eval.json", Json{{"model", id}, {"domain", c.get<std::string>("domain", "")}, {"reports", j}});
  write_text_file(run.out / "eval.txt", text.str());
  return run.finish();
}

RunManifest cmd_report(const CommandOptions& o) {
  const auto c = load_config(o);
  const auto cross_dir = c.path("crosseval");
  Run run("report", c, output_dir(o, c));
  run.input_stage("crosseval", cross_dir);
  const auto matrix = evalkit::CrossEvalMatrix::from_json(read_json_file(cross_dir / "report.json"));

  Json summary;
  std::ostringstream text;
  text << matrix.to_text() << "\n";
  std::optional<double> fl_avg;
  double best_local = -1.0;
  std::string best_local_id;
  for (const auto& [id, avg] : matrix.average_f1) {
    const auto& row = matrix.cells.at(id);
    std::set<std::string> owners;
    for (const auto& [_, r] : row) owners.insert(r.scaler_owner);
    if (owners.size() > 1) {
      fl_avg = avg;
      summary["federated_model"] = id;
    } else if (avg > best_local) {
      best_local = avg;
      best_local_id = id;
    }
  }
  summary["average_f1"] = matrix.average_f1;
  if (fl_avg) {
    summary["federated_average_f1"] = *fl_avg;
    summary["best_local_model"] = best_local_id;
    summary["best_local_average_f1"] = best_local;
    text << "Federated average F1 " << *fl_avg << " vs best local (" << best_local_id << ") " << best_local << "\n";
  }
  if (c.doc.contains("external")) {
    const auto ext_dir = c.path("external");
    if (fs::exists(ext_dir / kManifestFile)) {
      run.input_stage("external", ext_dir);
      const auto ext = read_json_file(ext_dir / "eval.json");
      text << "\n" << read_text_file(ext_dir / "eval.txt");
      Json f1 = Json::object();
      for (const auto& [d, r] : ext.at("reports").items()) f1[d] = r.at("f1");
      summary["external_f1"] = f1;
    }
  }
  write_json_file(run.out / "summary.json", summary);
  write_text_file(run.out / "report.txt", text.str());
  return run.finish();
}

using Handler = std::function<RunManifest(const CommandOptions&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"maketoy", cmd_maketoy},
      {"preprocess", cmd_preprocess},
      {"train-local", cmd_train_local},
      {"federate simulate", cmd_federate_simulate},
      {"federate serve", cmd_federate_serve},
      {"federate client", cmd_federate_client},
      {"generate", cmd_generate},
      {"audit", cmd_audit},
      {"crosseval", cmd_crosseval},
      {"external pretrain", cmd_external_pretrain},
      {"external finetune", cmd_external_finetune},
      {"external eval", cmd_external_eval},
      {"report", cmd_report},
  };
  return h;
}

}  // namespace

std::uint64_t resolve_seed(const Json& config, const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      require(used == std::strlen(env), ErrorKind::config, "");
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::config, std::string(kSeedEnv) + "='" + env + "' is not a non-negative integer");
    }
  }
  if (config.is_object() && config.contains("seed")) {
    require(config["seed"].is_number_unsigned() || (config["seed"].is_number_integer() && config["seed"].get<long long>() >= 0),
            ErrorKind::config, "config: seed must be a non-negative integer");
    return config["seed"].get<std::uint64_t>();
  }
  return 0;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, _] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

RunManifest run_command(const std::string& name, const CommandOptions& options) {
  auto it = handlers().find(name);
  if (it == handlers().end()) fail(ErrorKind::config, "unknown command '" + name + "'");
  try {
    return it->second(options);
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, name + ": " + e.what());
  }
}

}  // namespace ddoslab::pipeline
