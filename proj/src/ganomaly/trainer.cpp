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
#include "ganomaly/trainer.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "netcore/losses.hpp"

namespace ddoslab::ganomaly {

using netcore::GradAt;

Json LossSummary::to_json() const {
  return Json{{"adv", adv}, {"con", con}, {"enc", enc}, {"gen", gen}, {"disc", disc}, {"batches", batches}};
}

GeneratorStep generator_step(const GanomalyModel& model, const Matrix& x) {
  const auto& cfg = model.config;
  const std::size_t feat_layers = model.feature_layer() + 1;

  auto ge_c = netcore::forward(model.ge, x);
  const Matrix& z1 = ge_c.output();
  auto gd_c = netcore::forward(model.gd, z1);
  const Matrix& xh = gd_c.output();
  auto e_c = netcore::forward(model.e, xh);
  const Matrix& z2 = e_c.output();

  auto d_real = netcore::forward(model.d, x);
  auto d_fake = netcore::forward(model.d, xh);
  const Matrix& f_real = d_real.layer_output(model.feature_layer());
  const Matrix& f_fake = d_fake.layer_output(model.feature_layer());

  auto adv = netcore::mean_squared(f_fake, f_real);
  auto con = netcore::mean_absolute(xh, x);
  auto enc = netcore::mean_squared(z2, z1);  // grad w.r.t. z2; w.r.t. z1 is its negation

  GeneratorStep out;
  out.loss.adv = adv.value;
  out.loss.con = con.value;
  out.loss.enc = enc.value;
  out.loss.gen = cfg.w_adv * adv.value + cfg.w_con * con.value + cfg.w_enc * enc.value;
  out.loss.batches = 1;

  auto g_d = netcore::backward(model.d, d_fake, cfg.w_adv * adv.grad, GradAt::output, feat_layers);
  out.e = netcore::backward(model.e, e_c, cfg.w_enc * enc.grad);
  Matrix dxh = cfg.w_con * con.grad + g_d.input + out.e.input;
  out.gd = netcore::backward(model.gd, gd_c, dxh);
  Matrix dz1 = out.gd.input - cfg.w_enc * enc.grad;
  out.ge = netcore::backward(model.ge, ge_c, dz1);
  out.reconstruction = xh;
  return out;
}

DiscriminatorStep discriminator_step(const GanomalyModel& model, const Matrix& real, const Matrix& fake) {
  auto c_real = netcore::forward(model.d, real);
  auto c_fake = netcore::forward(model.d, fake);
  auto l_real = netcore::binary_cross_entropy(c_real.output(), Matrix::Ones(real.rows(), 1));
  auto l_fake = netcore::binary_cross_entropy(c_fake.output(), Matrix::Zero(fake.rows(), 1));
  auto g_real = netcore::backward(model.d, c_real, 0.5 * l_real.grad, GradAt::preactivation);
  auto g_fake = netcore::backward(model.d, c_fake, 0.5 * l_fake.grad, GradAt::preactivation);
  for (std::size_t k = 0; k < g_real.layers.size(); ++k) {
    g_real.layers[k].weight += g_fake.layers[k].weight;
    g_real.layers[k].bias += g_fake.layers[k].bias;
  }
  return DiscriminatorStep{0.5 * (l_real.value + l_fake.value), std::move(g_real)};
}

namespace {

netcore::OptimizerConfig adam(const GanomalyConfig& c) {
  netcore::OptimizerConfig o;
  o.kind = netcore::OptimizerKind::adam;
  o.learning_rate = c.learning_rate;
  o.beta1 = c.beta1;
  o.beta2 = c.beta2;
  return o;
}

void check_finite(double v, const char* component) {
  if (!std::isfinite(v)) fail(ErrorKind::numeric, std::string("ganomaly: non-finite ") + component + " loss");
}

}  // namespace

GanomalyTrainer::GanomalyTrainer(const GanomalyConfig& config)
    : ge_opt_(adam(config)), gd_opt_(adam(config)), e_opt_(adam(config)), d_opt_(adam(config)) {}

void check_training_table(const flowdata::FlowTable& train, std::size_t input_dim) {
  require(!train.empty(), ErrorKind::precondition, "ganomaly: empty training table");
  require(train.count(flowdata::Label::ddos) == 0, ErrorKind::precondition,
          "ganomaly: training table contains ddos rows; training is benign-only");
  require(train.cols() == input_dim, ErrorKind::shape,
          "ganomaly: training table has " + std::to_string(train.cols()) + " features, model expects " +
              std::to_string(input_dim));
  constexpr double kSlack = 1e-9;
  require(train.all_finite() && train.features().minCoeff() >= -kSlack && train.features().maxCoeff() <= 1.0 + kSlack,
          ErrorKind::precondition, "ganomaly: training features must be scaled to [0,1]");
}

LossSummary GanomalyTrainer::train_epoch(GanomalyModel& model, const flowdata::FlowTable& train, Rng& rng) {
  check_training_table(train, model.config.input_dim);
  std::vector<Eigen::Index> order(train.rows());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  rng.shuffle(order);

  const auto batch = static_cast<Eigen::Index>(model.config.batch_size);
  const Matrix& x_all = train.features();
  LossSummary sum;
  Matrix x;
  for (Eigen::Index start = 0; start < static_cast<Eigen::Index>(order.size()); start += batch) {
    const Eigen::Index n = std::min(batch, static_cast<Eigen::Index>(order.size()) - start);
    x.resize(n, x_all.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = x_all.row(order[static_cast<std::size_t>(start + i)]);

    auto g = generator_step(model, x);
    check_finite(g.loss.adv, "adversarial");
    check_finite(g.loss.con, "contextual");
    check_finite(g.loss.enc, "encoder");
    ge_opt_.step(model.ge, g.ge);
    gd_opt_.step(model.gd, g.gd);
    e_opt_.step(model.e, g.e);

    auto d = discriminator_step(model, x, g.reconstruction);
    check_finite(d.loss, "discriminator");
    d_opt_.step(model.d, d.grads);

    sum.adv += g.loss.adv;
    sum.con += g.loss.con;
    sum.enc += g.loss.enc;
    sum.gen += g.loss.gen;
    sum.disc += d.loss;
    ++sum.batches;
  }
  const double nb = static_cast<double>(sum.batches);
  sum.adv /= nb;
  sum.con /= nb;
  sum.enc /= nb;
  sum.gen /= nb;
  sum.disc /= nb;
  ++model.trained_epochs;
  return sum;
}

LossSummary GanomalyTrainer::train(GanomalyModel& model, const flowdata::FlowTable& train, std::size_t epochs,
                                   Rng& rng) {
  require(epochs >= 1, ErrorKind::config, "ganomaly: epochs must be at least 1");
  LossSummary last;
  for (std::size_t ep = 0; ep < epochs; ++ep) last = train_epoch(model, train, rng);
  refresh_latent_stats(model, train);
  return last;
}

void refresh_latent_stats(GanomalyModel& model, const flowdata::FlowTable& train) {
  require(!train.empty(), ErrorKind::precondition, "ganomaly: latent statistics need rows");
  const Matrix z = netcore::predict(model.ge, train.features());
  const double n = static_cast<double>(z.rows());
  model.latent.mean = z.colwise().sum().transpose() / n;
  const Matrix s = z.transpose() * z / n;
  model.latent.second_moment = 0.5 * (s + s.transpose());
}

}  // namespace ddoslab::ganomaly
