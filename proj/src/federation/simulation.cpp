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
#include "federation/simulation.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <future>
#include <set>

#include "common/error.hpp"
#include "common/random.hpp"
#include "flowdata/preprocess.hpp"

namespace ddoslab::federation {

void FLConfig::validate() const {
  require(rounds >= 1, ErrorKind::config, "federation: rounds must be at least 1");
  require(local_epochs >= 1, ErrorKind::config, "federation: local_epochs must be at least 1");
  require(!clients.empty(), ErrorKind::config, "federation: at least one client is required");
  require(min_quorum >= 1, ErrorKind::config, "federation: min_quorum must be at least 1");
  std::set<std::string> ids;
  for (const auto& c : clients) {
    require(!c.id.empty(), ErrorKind::config, "federation: empty client id");
    require(ids.insert(c.id).second, ErrorKind::config, "federation: duplicate client id '" + c.id + "'");
  }
  model.validate();
  require(columns.empty() || columns.size() == model.input_dim, ErrorKind::config,
          "federation: column list does not match model input_dim");
}

Json FLConfig::to_json() const {
  Json cl = Json::array();
  for (const auto& c : clients) cl.push_back({{"id", c.id}, {"data_dir", c.data_dir.string()}});
  return Json{{"rounds", rounds},
              {"local_epochs", local_epochs},
              {"clients", cl},
              {"weighting", to_string(weighting)},
              {"seed", seed},
              {"model", model.to_json()},
              {"columns", columns},
              {"join_timeout_s", join_timeout_s},
              {"round_timeout_s", round_timeout_s},
              {"min_quorum", min_quorum},
              {"parallel_clients", parallel_clients}};
}

FLConfig FLConfig::from_json(const Json& j) {
  FLConfig c;
  try {
    c.rounds = j.value("rounds", c.rounds);
    c.local_epochs = j.value("local_epochs", c.local_epochs);
    for (const auto& cl : j.value("clients", Json::array())) {
      c.clients.push_back({cl.at("id").get<std::string>(), cl.value("data_dir", std::string{})});
    }
    c.weighting = weighting_from_string(j.value("weighting", std::string("samples")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.columns = j.value("columns", std::vector<std::string>{});
    c.model = ganomaly::GanomalyConfig::from_json(j.value("model", Json::object()), c.columns.size());
    c.join_timeout_s = j.value("join_timeout_s", c.join_timeout_s);
    c.round_timeout_s = j.value("round_timeout_s", c.round_timeout_s);
    c.min_quorum = j.value("min_quorum", c.min_quorum);
    c.parallel_clients = j.value("parallel_clients", c.parallel_clients);
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, std::string("federation config: ") + e.what());
  }
  return c;
}

Json RoundLog::to_json() const {
  Json l = Json::object();
  for (const auto& [id, s] : losses) l[id] = s.to_json();
  return Json{{"round", round},
              {"losses", l},
              {"sample_counts", sample_counts},
              {"excluded", excluded},
              {"aggregation_ms", aggregation_ms},
              {"fingerprint", fingerprint}};
}

std::uint64_t client_stream_seed(std::uint64_t seed, const std::string& tag, std::size_t round) {
  return derive_seed(seed, "federation.client." + tag, round);
}

LocalClient::LocalClient(std::string id, const flowdata::FlowTable& train, const ganomaly::GanomalyConfig& config,
                         std::uint64_t seed)
    : id_(std::move(id)),
      stream_tag_(id_),
      scaler_(train.empty() ? flowdata::ScalerParams{} : flowdata::fit_scaler(train)),
      train_(train.empty() ? train : flowdata::apply_scaler(train, scaler_)),
      model_(ganomaly::GanomalyModel::create(config, seed)),
      trainer_(config),
      seed_(seed) {
  require(!train.empty(), ErrorKind::precondition, "client '" + id_ + "': no training rows");
  ganomaly::check_training_table(train_, config.input_dim);
}

std::unique_ptr<LocalClient> LocalClient::from_split_dir(const ClientSpec& spec, const ganomaly::GanomalyConfig& config,
                                                         std::uint64_t seed) {
  auto split = flowdata::read_split_set(spec.data_dir);
  return std::make_unique<LocalClient>(spec.id, split.train, config, seed);
}

ClientUpdate LocalClient::train_round(const netcore::ModelWeights& global, std::size_t round, std::size_t epochs) {
  model_.set_weights(global);
  Rng rng(client_stream_seed(seed_, stream_tag_, round));
  auto loss = trainer_.train(model_, train_, epochs, rng);
  return ClientUpdate{id_, round, model_.weights(), train_.rows(), loss};
}

ganomaly::GanomalyModel initial_global(const ganomaly::GanomalyConfig& config, std::uint64_t seed) {
  return ganomaly::GanomalyModel::create(config, derive_seed(seed, "federation.server", 0));
}

RoundResult run_round(const netcore::ModelWeights& global, const std::vector<ClientEndpoint*>& clients,
                      const FLConfig& config, std::size_t round) {
  RoundLog log;
  log.round = round;
  std::vector<ClientUpdate> updates;

  auto collect = [&](ClientEndpoint* client, std::function<ClientUpdate()> job) {
    try {
      updates.push_back(job());
    } catch (const std::exception& e) {
      log.excluded[client->id()] = e.what();
      spdlog::warn("round {}: client '{}' excluded: {}", round, client->id(), e.what());
    }
  };

  if (config.parallel_clients && clients.size() > 1) {
    std::vector<std::future<ClientUpdate>> jobs;
    for (auto* c : clients) {
      jobs.push_back(std::async(std::launch::async, [c, &global, round, &config] {
        return c->train_round(global, round, config.local_epochs);
      }));
    }
    for (std::size_t i = 0; i < clients.size(); ++i) collect(clients[i], [&] { return jobs[i].get(); });
  } else {
    for (auto* c : clients) collect(c, [&] { return c->train_round(global, round, config.local_epochs); });
  }

  if (updates.size() < config.min_quorum) {
    fail(ErrorKind::state, "round " + std::to_string(round) + ": only " + std::to_string(updates.size()) +
                               " client(s) delivered an update (quorum " + std::to_string(config.min_quorum) + ")");
  }
  for (const auto& u : updates) {
    log.losses[u.client_id] = u.loss;
    log.sample_counts[u.client_id] = u.sample_count;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto aggregated = fedavg(updates, config.weighting);
  log.aggregation_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  log.fingerprint = netcore::weights_fingerprint(aggregated);
  spdlog::info("round {}: aggregated {} update(s), fingerprint {}", round, updates.size(), log.fingerprint.substr(0, 12));
  return RoundResult{std::move(aggregated), std::move(log)};
}

FederationResult run_federation(const FLConfig& config, const std::vector<ClientEndpoint*>& clients) {
  config.validate();
  require(!clients.empty(), ErrorKind::config, "federation: no clients");
  FederationResult result{initial_global(config.model, config.seed), {}};
  auto global = result.model.weights();
  for (std::size_t r = 0; r < config.rounds; ++r) {
    auto round = run_round(global, clients, config, r);
    global = std::move(round.global);
    result.logs.push_back(std::move(round.log));
  }
  result.model.set_weights(global);
  result.model.trained_epochs = config.rounds * config.local_epochs;
  return result;
}

FederationResult simulate(const FLConfig& config) {
  config.validate();
  std::vector<std::unique_ptr<LocalClient>> owned;
  std::vector<ClientEndpoint*> clients;
  for (const auto& spec : config.clients) {
    owned.push_back(LocalClient::from_split_dir(spec, config.model, config.seed));
    clients.push_back(owned.back().get());
  }
  return run_federation(config, clients);
}

}  // namespace ddoslab::federation
