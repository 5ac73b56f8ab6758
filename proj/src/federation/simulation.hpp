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
#include <memory>
#include <string>
#include <vector>

#include "federation/fedavg.hpp"
#include "flowdata/scaler.hpp"
#include "ganomaly/model.hpp"
#include "ganomaly/trainer.hpp"

namespace ddoslab::federation {

struct ClientSpec {
  std::string id;
  std::filesystem::path data_dir;  // split directory written by preprocess
};

struct FLConfig {
  std::size_t rounds = 10;
  std::size_t local_epochs = 50;
  std::vector<ClientSpec> clients;
  Weighting weighting = Weighting::samples;
  std::uint64_t seed = 0;
  ganomaly::GanomalyConfig model;
  std::vector<std::string> columns;
  double join_timeout_s = 60.0;
  double round_timeout_s = 600.0;
  std::size_t min_quorum = 1;
  bool parallel_clients = false;

  void validate() const;
  Json to_json() const;
  static FLConfig from_json(const Json& j);
};

struct RoundLog {
  std::size_t round = 0;
  std::map<std::string, ganomaly::LossSummary> losses;
  std::map<std::string, std::uint64_t> sample_counts;
  std::map<std::string, std::string> excluded;  // client -> reason
  double aggregation_ms = 0.0;
  std::string fingerprint;  // SHA-256 of the aggregated weights blob

  Json to_json() const;
};

// One participant as the coordinator sees it.
class ClientEndpoint {
 public:
  virtual ~ClientEndpoint() = default;
  virtual const std::string& id() const = 0;
  virtual ClientUpdate train_round(const netcore::ModelWeights& global, std::size_t round, std::size_t epochs) = 0;
};

// In-process participant: private data, private scaler, private optimizer.
class LocalClient : public ClientEndpoint {
 public:
  // train must be the raw (unscaled) benign train split. The scaler is fitted
  // here and stays inside the client.
  LocalClient(std::string id, const flowdata::FlowTable& train, const ganomaly::GanomalyConfig& config,
              std::uint64_t seed);
  static std::unique_ptr<LocalClient> from_split_dir(const ClientSpec& spec, const ganomaly::GanomalyConfig& config,
                                                     std::uint64_t seed);

  const std::string& id() const override { return id_; }
  ClientUpdate train_round(const netcore::ModelWeights& global, std::size_t round, std::size_t epochs) override;

  // Per-round shuffling streams derive from (seed, stream tag, round); the
  // tag defaults to the client id.
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_stream_tag(std::string tag) { stream_tag_ = std::move(tag); }

  std::uint64_t sample_count() const { return train_.rows(); }
  const flowdata::ScalerParams& scaler() const { return scaler_; }
  const ganomaly::GanomalyModel& model() const { return model_; }

 private:
  std::string id_;
  std::string stream_tag_;
  flowdata::ScalerParams scaler_;
  flowdata::FlowTable train_;  // scaled
  ganomaly::GanomalyModel model_;
  ganomaly::GanomalyTrainer trainer_;
  std::uint64_t seed_;
};

std::uint64_t client_stream_seed(std::uint64_t seed, const std::string& tag, std::size_t round);

// Initial global model every participant starts from.
ganomaly::GanomalyModel initial_global(const ganomaly::GanomalyConfig& config, std::uint64_t seed);

struct RoundResult {
  netcore::ModelWeights global;
  RoundLog log;
};

// Broadcast -> local training -> FedAvg. A client that throws is left out of
// this round's aggregate and recorded in log.excluded.
RoundResult run_round(const netcore::ModelWeights& global, const std::vector<ClientEndpoint*>& clients,
                      const FLConfig& config, std::size_t round);

struct FederationResult {
  ganomaly::GanomalyModel model;
  std::vector<RoundLog> logs;

  std::string fingerprint() const { return ganomaly::bundle_fingerprint(model); }
};

FederationResult run_federation(const FLConfig& config, const std::vector<ClientEndpoint*>& clients);

// Loads every client from its split directory and runs all rounds in process.
FederationResult simulate(const FLConfig& config);

}  // namespace ddoslab::federation
