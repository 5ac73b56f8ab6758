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

// Central finite-difference check of every analytic gradient the trainer
// uses: plain dense nets under each activation and loss, and the four
// networks of the GANomaly objective.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "common/random.hpp"
#include "ganomaly/model.hpp"
#include "ganomaly/trainer.hpp"
#include "netcore/dense_net.hpp"
#include "netcore/losses.hpp"

namespace gradcheck {

using ddoslab::Matrix;
using ddoslab::Rng;
namespace nc = ddoslab::netcore;
namespace gn = ddoslab::ganomaly;

inline constexpr double kStep = 1e-5;
// Denominator floor so that gradients which are zero up to rounding do not
// turn into huge relative errors.
inline constexpr double kFloor = 1e-7;
// Pre-activations and L1 residuals closer than this to a kink are redrawn.
inline constexpr double kKinkMargin = 1e-3;

struct Result {
  double max_rel_error = 0.0;
  std::size_t nets = 0;
  std::size_t parameters = 0;
  std::set<std::string> activations;
  std::set<std::string> losses;
  std::string worst;
};

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kFloor});
}

inline bool is_kinked(nc::Activation a) {
  return a == nc::Activation::relu || a == nc::Activation::leaky_relu;
}

// Smallest |pre-activation| over kinked layers for this batch.
inline double kink_distance(const nc::DenseNet& net, const Matrix& batch) {
  auto cache = nc::forward(net, batch);
  double best = INFINITY;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const auto& l = net.layers()[k];
    if (!is_kinked(l.activation)) continue;
    Matrix pre = cache.inputs[k] * l.weight.transpose();
    pre.rowwise() += l.bias.transpose();
    best = std::min(best, pre.cwiseAbs().minCoeff());
  }
  return best;
}

// Compares analytic gradients with central differences of loss_of(net) for
// every weight and bias of net.
inline void compare(nc::DenseNet& net, const nc::Gradients& analytic, const std::function<double()>& loss_of,
                    const std::string& tag, Result& res) {
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const Eigen::Index rows = net.layers()[k].weight.rows();
    const Eigen::Index cols = net.layers()[k].weight.cols();
    auto probe = [&](double& slot, double a, const std::string& what) {
      const double keep = slot;
      slot = keep + kStep;
      net.mutable_layers();
      const double up = loss_of();
      slot = keep - kStep;
      net.mutable_layers();
      const double down = loss_of();
      slot = keep;
      net.mutable_layers();
      const double e = rel_error(a, (up - down) / (2 * kStep));
      ++res.parameters;
      if (e > res.max_rel_error) {
        res.max_rel_error = e;
        res.worst = tag + " " + net.name() + " layer " + std::to_string(k) + " " + what;
      }
    };
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j)
        probe(net.mutable_layers()[k].weight(i, j), analytic.layers[k].weight(i, j), "weight");
      probe(net.mutable_layers()[k].bias(i), analytic.layers[k].bias(i), "bias");
    }
  }
}

inline Matrix random_batch(Eigen::Index n, Eigen::Index d, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

enum class LossKind { mse, mae, bce };

inline const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mean_squared";
    case LossKind::mae: return "mean_absolute";
    default: return "binary_cross_entropy";
  }
}

// One random net of at most 3 layers and 16 units.
inline void check_dense(std::size_t index, Rng& rng, Result& res) {
  static const nc::Activation kActs[] = {nc::Activation::linear, nc::Activation::relu, nc::Activation::leaky_relu,
                                         nc::Activation::sigmoid, nc::Activation::tanh};
  const auto hidden = kActs[index % 5];
  const auto loss = static_cast<LossKind>((index / 5) % 3);
  const std::size_t depth = 1 + rng.below(3);
  std::vector<std::size_t> dims{1 + rng.below(6)};
  for (std::size_t k = 0; k < depth; ++k) dims.push_back(1 + rng.below(k + 1 == depth ? 4 : 16));
  nc::Activation out = kActs[rng.below(5)];
  if (loss == LossKind::bce) {
    out = nc::Activation::sigmoid;
    dims.back() = 1;
  }

  for (int attempt = 0;; ++attempt) {
    auto net = nc::DenseNet::init("net" + std::to_string(index), nc::make_chain(dims, hidden, out), rng.next_u64());
    // Non-zero biases so that every bias gradient is exercised.
    for (auto& l : net.mutable_layers())
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = rng.uniform(-0.5, 0.5);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(5));
    Matrix x = random_batch(n, static_cast<Eigen::Index>(dims.front()), rng);
    Matrix target = loss == LossKind::bce ? Matrix((random_batch(n, 1, rng, 0, 1).array() > 0.5).cast<double>())
                                          : random_batch(n, static_cast<Eigen::Index>(dims.back()), rng, 0, 1);
    auto loss_value = [&](const Matrix& pred) {
      switch (loss) {
        case LossKind::mse: return nc::mean_squared(pred, target);
        case LossKind::mae: return nc::mean_absolute(pred, target);
        default: return nc::binary_cross_entropy(pred, target);
      }
    };
    auto cache = nc::forward(net, x);
    bool near_kink = kink_distance(net, x) < kKinkMargin;
    if (loss == LossKind::mae) near_kink |= (cache.output() - target).cwiseAbs().minCoeff() < kKinkMargin;
    if (near_kink && attempt < 50) continue;

    auto lv = loss_value(cache.output());
    auto grads = nc::backward(net, cache, lv.grad,
                              loss == LossKind::bce ? nc::GradAt::preactivation : nc::GradAt::output);
    compare(net, grads, [&] { return loss_value(nc::predict(net, x)).value; },
            std::string(nc::to_string(hidden)) + "/" + nc::to_string(out) + "/" + loss_name(loss), res);
    res.activations.insert(nc::to_string(hidden));
    res.activations.insert(nc::to_string(out));
    res.losses.insert(loss_name(loss));
    ++res.nets;
    return;
  }
}

inline double ganomaly_kink_distance(const gn::GanomalyModel& m, const Matrix& x) {
  Matrix z = nc::predict(m.ge, x);
  Matrix xh = nc::predict(m.gd, z);
  double d = std::min({kink_distance(m.ge, x), kink_distance(m.gd, z), kink_distance(m.e, xh),
                       kink_distance(m.d, x), kink_distance(m.d, xh)});
  return std::min(d, (xh - x).cwiseAbs().minCoeff());
}

// Composite generator objective (adversarial + contextual + encoder terms)
// against GE, GD and E; discriminator cross-entropy against D.
inline void check_ganomaly(std::size_t index, Rng& rng, Result& res) {
  gn::GanomalyConfig cfg;
  cfg.input_dim = 2 + rng.below(4);
  cfg.latent_dim = 1 + rng.below(3);
  cfg.hidden = {2 + rng.below(6), 2 + rng.below(4)};
  cfg.w_adv = rng.uniform(0.5, 2.0);
  cfg.w_con = rng.uniform(1.0, 5.0);
  cfg.w_enc = rng.uniform(0.5, 2.0);
  for (int attempt = 0;; ++attempt) {
    auto model = gn::GanomalyModel::create(cfg, rng.next_u64());
    for (auto* net : {&model.ge, &model.gd, &model.e, &model.d})
      for (auto& l : net->mutable_layers())
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = rng.uniform(-0.3, 0.3);
    Matrix x = random_batch(3, static_cast<Eigen::Index>(cfg.input_dim), rng, 0, 1);
    if (ganomaly_kink_distance(model, x) < kKinkMargin && attempt < 50) continue;

    const std::string tag = "ganomaly#" + std::to_string(index);
    auto g = gn::generator_step(model, x);
    auto gen_loss = [&] { return gn::generator_step(model, x).loss.gen; };
    compare(model.ge, g.ge, gen_loss, tag + " generator", res);
    compare(model.gd, g.gd, gen_loss, tag + " generator", res);
    compare(model.e, g.e, gen_loss, tag + " generator", res);

    Matrix fake = g.reconstruction;
    auto d = gn::discriminator_step(model, x, fake);
    compare(model.d, d.grads, [&] { return gn::discriminator_step(model, x, fake).loss; }, tag + " discriminator",
            res);
    for (auto* net : {&model.ge, &model.gd, &model.e, &model.d})
      for (const auto& l : net->layers()) res.activations.insert(nc::to_string(l.activation));
    res.losses.insert("ganomaly.adversarial");
    res.losses.insert("ganomaly.contextual");
    res.losses.insert("ganomaly.encoder");
    res.losses.insert("ganomaly.discriminator");
    ++res.nets;
    return;
  }
}

// dense_nets random dense nets plus ganomaly_nets random GANomaly models.
inline Result run(std::size_t dense_nets, std::size_t ganomaly_nets, std::uint64_t seed) {
  Rng rng(seed);
  Result res;
  for (std::size_t i = 0; i < dense_nets; ++i) check_dense(i, rng, res);
  for (std::size_t i = 0; i < ganomaly_nets; ++i) check_ganomaly(i, rng, res);
  return res;
}

}  // namespace gradcheck
