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

// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 when a
// gating criterion fails.
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "common/error.hpp"
#include "common/json_io.hpp"
#include "common/random.hpp"
#include "common/sha256.hpp"
#include "common/stats.hpp"
#include "evalkit/evaluate.hpp"
#include "evalkit/metrics.hpp"
#include "federation/fedavg.hpp"
#include "federation/simulation.hpp"
#include "federation/wire.hpp"
#include "flowdata/csv.hpp"
#include "flowdata/preprocess.hpp"
#include "flowdata/scaler.hpp"
#include "ganomaly/detector.hpp"
#include "ganomaly/model.hpp"
#include "gradcheck.hpp"
#include "pipeline/commands.hpp"

namespace fs = std::filesystem;
using namespace ddoslab;
using flowdata::FlowTable;
using flowdata::Label;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  std::string id;
  enum { pass, fail, skip } status = fail;
  std::string detail;
  double seconds = 0.0;
  bool gating = true;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print(const Outcome& o) {
  const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
  std::printf("%s %s (%.1f s) %s\n", o.id.c_str(), tag, o.seconds, o.detail.c_str());
  std::fflush(stdout);
}

// Runs a criterion body; exceptions count as failure with their message.
// `prior_s` is time already spent in pipeline stages the criterion covers.
Outcome criterion(const std::string& id, double budget_s, const std::function<bool(std::string&)>& body,
                  double prior_s = 0.0) {
  Outcome o{id};
  const auto t0 = Clock::now();
  try {
    std::string detail;
    const bool ok = body(detail);
    o.seconds = prior_s + seconds_since(t0);
    o.detail = detail;
    const bool in_time = o.seconds < budget_s;
    if (!in_time) o.detail += " runtime over " + fmt(budget_s, 0) + " s budget";
    o.status = ok && in_time ? Outcome::pass : Outcome::fail;
  } catch (const std::exception& e) {
    o.seconds = seconds_since(t0);
    o.detail = std::string("error: ") + e.what();
    o.status = Outcome::fail;
  }
  return o;
}

// ---- toy pipeline ------------------------------------------------------------

struct StageRecord {
  std::string fingerprint;
  double seconds = 0.0;
};

struct ToyRun {
  fs::path root;
  std::uint64_t seed = 0;
  std::map<std::string, StageRecord> stages;  // stage label -> record
  double seconds = 0.0;

  fs::path configs() const { return root / "toy" / "configs"; }
};

StageRecord stage(ToyRun& run, const std::string& label, const std::string& command, const std::string& config) {
  pipeline::CommandOptions o;
  o.config = run.configs() / config;
  const auto t0 = Clock::now();
  auto m = pipeline::run_command(command, o);
  StageRecord r{m.output_fingerprint(), seconds_since(t0)};
  run.stages[label] = r;
  return r;
}

// maketoy -> preprocess -> three locals -> federation -> crosseval, and with
// `full` also generate -> audit -> external models -> report.
ToyRun run_toy(const fs::path& root, std::uint64_t seed, bool full) {
  ToyRun run{root, seed, {}, 0.0};
  const auto t0 = Clock::now();
  fs::remove_all(root);
  {
    pipeline::CommandOptions o;
    o.out = root / "toy";
    o.seed = seed;
    const auto s0 = Clock::now();
    run.stages["maketoy"] = {pipeline::run_command("maketoy", o).output_fingerprint(), seconds_since(s0)};
  }
  stage(run, "preprocess", "preprocess", "preprocess.json");
  for (const char* s : {"A", "B", "C"})
    stage(run, std::string("train-local ") + s, "train-local", std::string("train_local_") + s + ".json");
  stage(run, "federate", "federate simulate", "federate.json");
  if (full) {
    stage(run, "generate", "generate", "generate.json");
    stage(run, "audit", "audit", "audit.json");
    stage(run, "external pretrain", "external pretrain", "external.json");
    stage(run, "external finetune", "external finetune", "external.json");
    stage(run, "external eval", "external eval", "external.json");
  }
  stage(run, "crosseval", "crosseval", "crosseval.json");
  if (full) stage(run, "report", "report", "report.json");
  run.seconds = seconds_since(t0);
  return run;
}

evalkit::CrossEvalMatrix crosseval_of(const ToyRun& run) {
  return evalkit::CrossEvalMatrix::from_json(read_json_file(run.root / "crosseval" / "report.json"));
}

ganomaly::Calibration calibration_of(const fs::path& model_dir, const std::string& silo) {
  return ganomaly::Calibration::from_json(read_json_file(model_dir / "calibration" / (silo + ".json")));
}

// ---- criteria ------------------------------------------------------------------

bool c1(std::string& detail) {
  auto res = gradcheck::run(100, 20, 20260101);
  const std::set<std::string> acts = {"linear", "relu", "leaky_relu", "sigmoid", "tanh"};
  const std::set<std::string> losses = {"mean_squared",         "mean_absolute",       "binary_cross_entropy",
                                        "ganomaly.adversarial", "ganomaly.contextual", "ganomaly.encoder",
                                        "ganomaly.discriminator"};
  bool covered = std::includes(res.activations.begin(), res.activations.end(), acts.begin(), acts.end()) &&
                 std::includes(res.losses.begin(), res.losses.end(), losses.begin(), losses.end());
  detail = "nets=" + std::to_string(res.nets) + " params=" + std::to_string(res.parameters) +
           " max_rel_err=" + std::to_string(res.max_rel_error) + " activations=" + std::to_string(res.activations.size()) +
           " losses=" + std::to_string(res.losses.size());
  if (res.max_rel_error > 1e-4) detail += " worst: " + res.worst;
  return covered && res.max_rel_error <= 1e-4;
}

bool c2(std::string& detail) {
  using federation::ClientUpdate;
  using netcore::ModelWeights;
  using netcore::Tensor;
  auto up = [](const std::string& id, std::vector<double> v, std::uint64_t n) {
    const auto size = static_cast<std::uint64_t>(v.size());
    return ClientUpdate{id, 0, ModelWeights{{Tensor{{size}, std::move(v)}}}, n, {}};
  };
  bool ok = true;
  std::vector<std::string> notes;

  Rng rng(5);
  std::vector<double> w(64);
  for (auto& x : w) x = rng.normal() * 10;
  ok &= federation::fedavg({up("a", w, 13)}).tensors[0].values == w;

  std::vector<double> neg(w.size());
  std::transform(w.begin(), w.end(), neg.begin(), [](double x) { return -x; });
  auto sym = federation::fedavg({up("a", w, 7), up("b", neg, 7)}).tensors[0].values;
  ok &= std::all_of(sym.begin(), sym.end(), [](double x) { return x == 0.0; });

  auto mean = federation::fedavg({up("a", {3}, 1), up("b", {6}, 2), up("c", {9}, 3)}).tensors[0].values[0];
  ok &= mean == (1.0 * 3 + 2.0 * 6 + 3.0 * 9) / 6.0 && mean == 7.0;
  notes.push_back("weighted_mean=" + fmt(mean, 17));

  std::vector<ClientUpdate> ups;
  for (int k = 0; k < 6; ++k) {
    std::vector<double> v(200);
    for (auto& x : v) x = rng.normal() * std::pow(10.0, rng.uniform(-4, 4));
    ups.push_back(up("client" + std::to_string(k), v, 1 + rng.below(5000)));
  }
  const auto ref = federation::fedavg(ups);
  int perms = 0;
  for (int t = 0; t < 50; ++t) {
    rng.shuffle(ups);
    perms += federation::fedavg(ups) == ref;
  }
  ok &= perms == 50;
  notes.push_back("bitwise_permutations=" + std::to_string(perms) + "/50");
  detail = notes[0] + " " + notes[1];
  return ok;
}

double pairwise_auc(const std::vector<double>& s, const std::vector<Label>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != Label::ddos) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != Label::benign) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

double interp_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (pos - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

bool c3(std::string& detail) {
  Rng rng(31337);
  int auc_exact = 0, f1_ok = 0, q_ok = 0;
  double f1_err = 0, q_err = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(999);
    const double levels = 1.0 + static_cast<double>(rng.below(40));
    std::vector<double> s(n);
    std::vector<Label> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::floor(rng.uniform() * levels) / levels;
      y[i] = rng.uniform() < 0.35 ? Label::ddos : Label::benign;
      p[i] = rng.uniform() < 0.35 ? Label::ddos : Label::benign;
    }
    y[0] = Label::ddos;
    y[1] = Label::benign;
    auc_exact += evalkit::roc_auc(s, y) == pairwise_auc(s, y);

    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += p[i] == Label::ddos && y[i] == Label::ddos;
      fp += p[i] == Label::ddos && y[i] == Label::benign;
      fn += p[i] == Label::benign && y[i] == Label::ddos;
    }
    const double denom = 2.0 * tp + fp + fn;
    const double e = std::abs(evalkit::f1(p, y) - (denom == 0 ? 0.0 : 2.0 * tp / denom));
    f1_err = std::max(f1_err, e);
    f1_ok += e <= 1e-12;

    std::vector<double> v(1 + rng.below(1000));
    for (auto& x : v) x = rng.uniform();
    const double q = rng.uniform(0.01, 0.99);
    const double qe = std::abs(evalkit::threshold_from_scores(v, q).threshold - interp_quantile(v, q));
    q_err = std::max(q_err, qe);
    q_ok += qe <= 1e-12;
  }
  detail = "auc_exact=" + std::to_string(auc_exact) + "/100 f1_max_err=" + std::to_string(f1_err) +
           " quantile_max_err=" + std::to_string(q_err);
  return auc_exact == 100 && f1_ok == 100 && q_ok == 100;
}

bool c4(const ToyRun& run, std::string& detail) {
  const auto dir = run.root / "models" / "local_A";
  const auto training = read_json_file(dir / "training.json");
  const auto epochs = training.at("epochs").get<std::size_t>();
  auto det = ganomaly::make_detector(ganomaly::load_bundle(dir / "model"), calibration_of(dir, "A"));
  const auto test = flowdata::read_split_set(run.root / "splits" / "A").test;
  auto rep = evalkit::evaluate(*det, test, det->model().score_norm ? calibration_of(dir, "A").threshold.threshold : 0.0,
                               "local_A", "A");
  const double auc = rep.roc_auc.value_or(0.0);
  detail = "epochs=" + std::to_string(epochs) + " auc=" + fmt(auc) + " f1=" + fmt(rep.f1) + " train_s=" +
           fmt(run.stages.at("train-local A").seconds, 1);
  return epochs == 50 && auc >= 0.95 && rep.f1 >= 0.80;
}

bool c5(const std::vector<ToyRun>& runs, std::string& detail) {
  std::map<std::string, double> sums;
  std::ostringstream per_seed;
  for (const auto& r : runs) {
    auto m = crosseval_of(r);
    per_seed << " seed" << r.seed << "[";
    for (const auto& [model, f1] : m.average_f1) {
      sums[model] += f1;
      per_seed << model << "=" << fmt(f1, 3) << " ";
    }
    per_seed << "]";
  }
  const double n = static_cast<double>(runs.size());
  const double fl = sums.at("fl") / n;
  double best_local = -1;
  std::string best_id;
  for (const auto& [model, s] : sums) {
    if (model == "fl") continue;
    if (s / n > best_local) {
      best_local = s / n;
      best_id = model;
    }
  }
  detail = "seeds=" + std::to_string(runs.size()) + " fl_avg_f1=" + fmt(fl) + " best_local=" + best_id + ":" +
           fmt(best_local) + per_seed.str();
  return sums.size() == 4 && fl > best_local;
}

bool c6(const ToyRun& run, std::string& detail) {
  const auto audit = read_json_file(run.root / "audit" / "audit.json");
  const double rows = audit.at("rows").get<double>();
  const double ratio = audit.at("rows_with_violations").get<double>() / rows;

  // Synthetic rows come out in silo A's feature units; back in the model's
  // [0,1] space they are compared with every silo's own scaled train split.
  const auto fl_dir = run.root / "models" / "fl";
  const auto gen_cfg = read_json_file(run.configs() / "generate.json");
  const auto scaler_silo = gen_cfg.at("scaler_silo").get<std::string>();
  const auto synthetic = flowdata::read_table_csv(run.root / "synthetic" / "synthetic.csv");
  const Matrix syn = flowdata::apply_scaler(synthetic, calibration_of(fl_dir, scaler_silo).scaler).features();
  std::vector<FlowTable> scaled;
  for (const char* s : {"A", "B", "C"}) {
    auto train = flowdata::read_split_set(run.root / "splits" / s).train;
    scaled.push_back(flowdata::apply_scaler(train, calibration_of(fl_dir, s).scaler));
  }
  auto pooled = flowdata::concat_rows({&scaled[0], &scaled[1], &scaled[2]}, "pooled").features();
  std::size_t within = 0;
  double worst = 0;
  std::string worst_col;
  for (Eigen::Index c = 0; c < pooled.cols(); ++c) {
    const double m = pooled.col(c).mean();
    const double sd = std::sqrt((pooled.col(c).array() - m).square().mean());
    const double gap = std::abs(syn.col(c).mean() - m);
    const double z = sd > 0 ? gap / sd : (gap == 0 ? 0.0 : INFINITY);
    if (z <= 0.5) ++within;
    if (z > worst) {
      worst = z;
      worst_col = synthetic.column_names()[static_cast<std::size_t>(c)];
    }
  }

  const auto eval = read_json_file(run.root / "external" / "eval" / "eval.json");
  const auto domain = eval.at("domain").get<std::string>();
  const auto& reports = eval.at("reports");
  const double own = reports.at(domain).at("f1").get<double>();
  double best_foreign = 0;
  std::string best_id;
  std::ostringstream foreign;
  for (const auto& [d, r] : reports.items()) {
    if (d == domain) continue;
    const double f = r.at("f1").get<double>();
    foreign << d << "=" << fmt(f, 3) << " ";
    if (f > best_foreign) {
      best_foreign = f;
      best_id = d;
    }
  }
  const auto model = read_json_file(run.root / "external" / "finetuned" / "model.json");
  detail = "rows=" + std::to_string(static_cast<long>(rows)) + " violation_ratio=" + fmt(ratio) + " means_within=" +
           std::to_string(within) + "/" + std::to_string(pooled.cols()) + " worst=" + worst_col + ":" + fmt(worst, 3) +
           "sd kind=" + model.at("kind").get<std::string>() + " own_f1(" + domain + ")=" + fmt(own, 3) +
           " foreign: " + foreign.str();
  return rows == 10000 && ratio < 0.05 && within == static_cast<std::size_t>(pooled.cols()) && own >= 0.8 &&
         best_foreign >= 0.6;
}

std::uint16_t free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

std::map<std::string, std::string> bin_hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".bin") out[e.path().filename().string()] = sha256_file(e.path());
  return out;
}

// Wire mode over loopback through the same commands a user would run.
bool wire_matches_simulation(const ToyRun& run, std::string& detail) {
  const auto cfg_dir = run.configs();
  auto base = read_json_file(cfg_dir / "federate.json");
  base["clients"] = Json::array({"A", "B"});
  base["rounds"] = 2;
  base["local_epochs"] = 5;
  base["join_timeout_s"] = 60.0;
  base["round_timeout_s"] = 300.0;
  auto sim = base;
  sim["out"] = "../../wire/simulated";
  auto srv = base;
  srv["out"] = "../../wire/server";
  write_json_file(cfg_dir / "wire_simulate.json", sim);
  write_json_file(cfg_dir / "wire_serve.json", srv);

  pipeline::CommandOptions so;
  so.config = cfg_dir / "wire_simulate.json";
  pipeline::run_command("federate simulate", so);

  const std::string bind = "127.0.0.1:" + std::to_string(free_port());
  std::string server_error;
  std::thread server([&] {
    try {
      pipeline::CommandOptions o;
      o.config = cfg_dir / "wire_serve.json";
      o.bind = bind;
      pipeline::run_command("federate serve", o);
    } catch (const std::exception& e) {
      server_error = e.what();
    }
  });
  std::vector<std::string> client_errors(2);
  std::vector<std::thread> clients;
  const std::vector<std::string> silos = {"A", "B"};
  for (std::size_t i = 0; i < silos.size(); ++i) {
    clients.emplace_back([&, i] {
      try {
        pipeline::CommandOptions o;
        o.config = cfg_dir / ("federate_client_" + silos[i] + ".json");
        o.server = bind;
        pipeline::run_command("federate client", o);
      } catch (const std::exception& e) {
        client_errors[i] = e.what();
      }
    });
  }
  for (auto& t : clients) t.join();
  server.join();
  if (!server_error.empty() || !client_errors[0].empty() || !client_errors[1].empty()) {
    detail = "wire run failed: server[" + server_error + "] A[" + client_errors[0] + "] B[" + client_errors[1] + "]";
    return false;
  }
  const auto sim_bins = bin_hashes(run.root / "wire" / "simulated" / "model");
  const bool server_same = bin_hashes(run.root / "wire" / "server" / "model") == sim_bins;
  const bool clients_same = bin_hashes(run.root / "wire" / "client_A" / "model") == sim_bins &&
                            bin_hashes(run.root / "wire" / "client_B" / "model") == sim_bins;
  // Per-client losses stay on the clients in wire mode.
  auto without_losses = [](Json j) {
    for (auto& r : j.is_array() ? j : j.at("rounds")) r.erase("losses");
    return j;
  };
  const bool rounds_same = without_losses(read_json_file(run.root / "wire" / "server" / "rounds.json")) ==
                           without_losses(read_json_file(run.root / "wire" / "simulated" / "rounds.json"));
  detail += "wire==simulation weights: server=" + std::string(server_same ? "yes" : "no") +
            " clients=" + (clients_same ? "yes" : "no") + " round_logs=" + (rounds_same ? "yes" : "no");
  return server_same && clients_same && rounds_same && sim_bins.size() == 4;
}

// One silo keeps training while a second joins, takes the round-0 weights and
// hangs up before answering.
bool disconnect_survived(const ToyRun& run, std::string& detail) {
  auto pre = read_json_file(run.configs() / "federate.json");
  const auto schema = flowdata::FlowSchema::from_json(read_json_file(run.root / "toy" / "schema.json"));
  federation::FLConfig cfg;
  cfg.rounds = 3;
  cfg.local_epochs = 2;
  cfg.clients = {{"A", {}}, {"B", {}}};
  cfg.seed = run.seed;
  cfg.columns = schema.processed_columns();
  cfg.model = ganomaly::GanomalyConfig::from_json(pre.at("model"), cfg.columns.size());
  cfg.join_timeout_s = 30;
  cfg.round_timeout_s = 120;
  federation::WireServer server(cfg);
  const auto port = server.bind(federation::parse_endpoint("127.0.0.1:0"));
  const federation::Endpoint ep{"127.0.0.1", port};
  federation::FederationResult result;
  std::string server_error;
  std::thread st([&] {
    try {
      result = server.run();
    } catch (const std::exception& e) {
      server_error = e.what();
    }
  });
  std::thread quitter([&] {
    try {
      auto s = federation::Socket::connect(ep, federation::deadline_after(20));
      s.send_frame(federation::make_frame(
          federation::JoinMsg{federation::kProtocolVersion, "B", ganomaly::architecture_hash(cfg.model, cfg.columns)}));
      federation::parse_accept(s.recv_frame(federation::deadline_after(30)));
      federation::parse_weights(s.recv_frame(federation::deadline_after(60)));
    } catch (const std::exception&) {
    }
  });
  auto train = flowdata::read_split_set(run.root / "splits" / "A").train;
  federation::LocalClient a("A", train, cfg.model, 0);
  std::string client_error;
  try {
    federation::run_wire_client(ep, a, cfg.model, cfg.columns);
  } catch (const std::exception& e) {
    client_error = e.what();
  }
  quitter.join();
  st.join();
  if (!server_error.empty() || !client_error.empty()) {
    detail = "server[" + server_error + "] client[" + client_error + "]";
    return false;
  }
  const bool logged = result.logs.size() == 3 && result.logs[0].excluded.count("B") == 1;
  const bool continued = result.logs.size() == 3 && result.logs[2].sample_counts.count("A") == 1;
  detail = "disconnect: rounds=" + std::to_string(result.logs.size()) +
           " excluded_logged=" + (logged ? std::string("yes (") + result.logs[0].excluded.at("B") + ")" : "no") +
           " continued=" + (continued ? "yes" : "no");
  return logged && continued;
}

bool c7(const ToyRun& first, const fs::path& rerun_root, std::string& detail) {
  auto again = run_toy(rerun_root, first.seed, true);
  std::vector<std::string> differing;
  for (const auto& [label, rec] : first.stages) {
    auto it = again.stages.find(label);
    if (it == again.stages.end() || it->second.fingerprint != rec.fingerprint) differing.push_back(label);
  }
  detail = "stages=" + std::to_string(first.stages.size()) + " identical=" +
           std::to_string(first.stages.size() - differing.size()) + " pipeline_s=" + fmt(again.seconds, 1) + "; ";
  for (const auto& d : differing) detail += "differs:" + d + " ";
  const bool determinism = differing.empty() && again.stages.size() == first.stages.size();
  const bool in_time = again.seconds < 600.0;
  std::string wire_detail, drop_detail;
  const bool wire = wire_matches_simulation(again, wire_detail);
  const bool drop = disconnect_survived(again, drop_detail);
  detail += wire_detail + "; " + drop_detail;
  return determinism && in_time && wire && drop;
}

// Optional full-data path: a directory of stage configs written for the real
// corpora (preprocess.json, train_local_*.json, federate.json,
// crosseval.json). Reported, never gating.
Outcome c8() {
  Outcome o{"C8"};
  o.gating = false;
  const char* dir = std::getenv("DDOSLAB_FULL_DATA_CONFIG");
  if (!dir || !*dir) {
    o.status = Outcome::skip;
    o.detail = "set DDOSLAB_FULL_DATA_CONFIG to a directory of full-data stage configs to run this check";
    return o;
  }
  const auto t0 = Clock::now();
  try {
    const fs::path cfg(dir);
    auto run = [&](const std::string& cmd, const fs::path& file) {
      pipeline::CommandOptions opt;
      opt.config = file;
      return pipeline::run_command(cmd, opt);
    };
    run("preprocess", cfg / "preprocess.json");
    for (const auto& e : fs::directory_iterator(cfg)) {
      const auto name = e.path().filename().string();
      if (name.rfind("train_local_", 0) == 0) run("train-local", e.path());
    }
    run("federate simulate", cfg / "federate.json");
    run("crosseval", cfg / "crosseval.json");
    const auto cross_cfg = read_json_file(cfg / "crosseval.json");
    const auto out = cfg / cross_cfg.at("out").get<std::string>();
    auto m = evalkit::CrossEvalMatrix::from_json(read_json_file(out / "report.json"));
    std::cout << m.to_text();
    const double fl = m.average_f1.at("fl");
    o.detail = "fl_avg_f1=" + fmt(fl) + " reference 0.747 +-0.15: " + (std::abs(fl - 0.747) <= 0.15 ? "within" : "outside");
    o.status = Outcome::pass;
  } catch (const std::exception& e) {
    o.detail = std::string("error: ") + e.what();
    o.status = Outcome::fail;
  }
  o.seconds = seconds_since(t0);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddoslab acceptance checks"};
  std::string work = (fs::temp_directory_path() / "ddoslab_acceptance").string();
  std::size_t seeds = 5;
  std::vector<std::string> only;
  bool keep = false;
  app.add_option("--work", work, "Scratch directory for toy pipeline runs");
  app.add_option("--seeds", seeds, "Seeds averaged for the multi-domain check")->check(CLI::Range(1, 50));
  app.add_option("--only", only, "Run only these criteria (C1..C8)")->delimiter(',');
  app.add_flag("--keep", keep, "Keep the scratch directory");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  auto wanted = [&](const std::string& id) { return only.empty() || std::count(only.begin(), only.end(), id) > 0; };
  const fs::path root(work);
  std::vector<Outcome> outcomes;
  auto record = [&](Outcome o) {
    print(o);
    outcomes.push_back(std::move(o));
  };

  if (wanted("C1")) record(criterion("C1", 60, c1));
  if (wanted("C2")) record(criterion("C2", 1, c2));
  if (wanted("C3")) record(criterion("C3", 30, c3));

  const bool need_toy = wanted("C4") || wanted("C5") || wanted("C6") || wanted("C7");
  std::vector<ToyRun> runs;
  std::string toy_error;
  if (need_toy) {
    try {
      const std::size_t n = wanted("C5") ? seeds : 1;
      for (std::size_t s = 1; s <= n; ++s) {
        runs.push_back(run_toy(root / ("seed_" + std::to_string(s)), s, s == 1));
        std::printf("# toy pipeline seed %zu finished in %.1f s\n", s, runs.back().seconds);
        std::fflush(stdout);
      }
    } catch (const std::exception& e) {
      toy_error = e.what();
    }
  }
  auto toy_criterion = [&](const std::string& id, double budget, const std::function<bool(std::string&)>& body,
                           double prior_s = 0.0) {
    if (!toy_error.empty() || runs.empty()) {
      Outcome o{id};
      o.detail = "toy pipeline failed: " + toy_error;
      record(o);
      return;
    }
    record(criterion(id, budget, body, prior_s));
  };
  if (wanted("C4")) {
    const double train_s = runs.empty() ? 0 : runs[0].stages["train-local A"].seconds;
    toy_criterion("C4", 180, [&](std::string& d) { return c4(runs[0], d); }, train_s);
  }
  if (wanted("C5")) {
    double total = 0;
    for (const auto& r : runs) total += r.seconds;
    toy_criterion("C5", 900, [&](std::string& d) { return c5(runs, d); }, total);
  }
  if (wanted("C6")) {
    double stages = 0;
    if (!runs.empty())
      for (const char* s : {"federate", "generate", "audit", "external pretrain", "external finetune", "external eval"})
        stages += runs[0].stages[s].seconds;
    toy_criterion("C6", 600, [&](std::string& d) { return c6(runs[0], d); }, stages);
  }
  if (wanted("C7")) toy_criterion("C7", 600, [&](std::string& d) { return c7(runs[0], root / "seed_1_rerun", d); });
  if (wanted("C8")) record(c8());

  if (!keep) {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  int failed = 0;
  for (const auto& o : outcomes) failed += o.gating && o.status == Outcome::fail;
  std::printf("acceptance: %zu checked, %d failed\n", outcomes.size(), failed);
  return failed == 0 ? 0 : 1;
}
