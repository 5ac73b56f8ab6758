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

#include "common/random.hpp"
#include "flowdata/flow_table.hpp"
#include "ganomaly/model.hpp"
#include "netcore/optimizer.hpp"

namespace ddoslab::ganomaly {

// Mean per-batch loss components over one epoch (or one batch).
struct LossSummary {
  double adv = 0.0;
  double con = 0.0;
  double enc = 0.0;
  double gen = 0.0;   // w_adv*adv + w_con*con + w_enc*enc
  double disc = 0.0;  // discriminator binary cross-entropy
  std::size_t batches = 0;

  Json to_json() const;
};

struct GeneratorStep {
  LossSummary loss;
  netcore::Gradients ge;
  netcore::Gradients gd;
  netcore::Gradients e;
  Matrix reconstruction;  // x_hat, kept for the discriminator step
};

// Composite generator objective on one batch and its gradients:
//   adv = mean (f_D(x) - f_D(x_hat))^2   (feature matching, real side fixed)
//   con = mean |x - x_hat|
//   enc = mean (GE(x) - E(x_hat))^2
// with x_hat = GD(GE(x)) and f_D the discriminator's last hidden layer.
GeneratorStep generator_step(const GanomalyModel& model, const Matrix& batch);

struct DiscriminatorStep {
  double loss = 0.0;
  netcore::Gradients grads;
};

// 0.5 * (BCE(D(x), 1) + BCE(D(x_hat), 0)) with x_hat treated as a constant.
DiscriminatorStep discriminator_step(const GanomalyModel& model, const Matrix& real, const Matrix& fake);

// Owns the optimizer state of one participant. Optimizer state never leaves
// the participant; only model parameters do.
class GanomalyTrainer {
 public:
  explicit GanomalyTrainer(const GanomalyConfig& config);

  // One shuffled pass over a benign, [0,1]-scaled table: per batch a
  // generator update followed by a discriminator update.
  LossSummary train_epoch(GanomalyModel& model, const flowdata::FlowTable& train, Rng& rng);

  // Runs `epochs` epochs from one rng stream, then refreshes the latent
  // statistics. Returns the last epoch's summary.
  LossSummary train(GanomalyModel& model, const flowdata::FlowTable& train, std::size_t epochs, Rng& rng);

 private:
  netcore::Optimizer ge_opt_;
  netcore::Optimizer gd_opt_;
  netcore::Optimizer e_opt_;
  netcore::Optimizer d_opt_;
};

void refresh_latent_stats(GanomalyModel& model, const flowdata::FlowTable& train);

// Rejects ddos rows and values outside [0,1] (beyond rounding slack).
void check_training_table(const flowdata::FlowTable& train, std::size_t input_dim);

}  // namespace ddoslab::ganomaly
