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
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "doctest.h"
#include "gradcheck.hpp"
#include "helpers.hpp"
#include "netcore/dense_net.hpp"
#include "netcore/losses.hpp"
#include "netcore/optimizer.hpp"
#include "netcore/weights.hpp"

// Fingerprint frozen from the first build; changes only with the init or
// serialisation format.
#define GOLDEN_HASH std::string("a81881436982655ae14180a444572bed8f5710c081906170ef6592c363f41275")

using namespace ddoslab;
using namespace ddoslab::netcore;

namespace {

DenseNet single(double w, double b, Activation act) {
  Layer l;
  l.weight = Matrix::Constant(1, 1, w);
  l.bias = Vector::Constant(1, b);
  l.activation = act;
  return DenseNet("single", {l}, 0);
}

}  // namespace

TEST_CASE("forward: identity linear layer returns the input") {
  Layer l{Matrix::Identity(3, 3), Vector::Zero(3), Activation::linear};
  DenseNet net("id", {l}, 0);
  Rng rng(1);
  Matrix x = testutil::uniform(4, 3, rng);
  CHECK(predict(net, x) == x);
}

TEST_CASE("forward: zero relu layer outputs zeros") {
  Layer l{Matrix::Zero(2, 3), Vector::Zero(2), Activation::relu};
  DenseNet net("zero", {l}, 0);
  Rng rng(2);
  CHECK(predict(net, testutil::uniform(5, 3, rng)).isZero());
}

TEST_CASE("forward: sigmoid of zero is one half") {
  auto net = single(1.0, 0.0, Activation::sigmoid);
  CHECK(predict(net, Matrix::Zero(1, 1))(0, 0) == 0.5);
}

TEST_CASE("forward: dimension mismatch") {
  auto net = single(1.0, 0.0, Activation::linear);
  CHECK_THROWS_AS(forward(net, Matrix::Zero(2, 3)), Error);
}

TEST_CASE("backward: squared error at the optimum gives zero gradient") {
  Rng rng(3);
  auto net = DenseNet::init("lin", make_chain({3, 2}, Activation::linear, Activation::linear), 5);
  Matrix x = testutil::uniform(6, 3, rng);
  auto cache = forward(net, x);
  auto loss = mean_squared(cache.output(), cache.output());
  auto g = backward(net, cache, loss.grad);
  CHECK(g.layers[0].weight.isZero());
  CHECK(g.layers[0].bias.isZero());
}

TEST_CASE("backward: single neuron matches hand calculus") {
  // y = w x, L = 1/2 (y - t)^2, dL/dw = (w x - t) x
  const double w = 1.7, x = 0.6, t = 0.2;
  auto net = single(w, 0.0, Activation::linear);
  Matrix in = Matrix::Constant(1, 1, x);
  auto cache = forward(net, in);
  Matrix dl = Matrix::Constant(1, 1, cache.output()(0, 0) - t);
  auto g = backward(net, cache, dl);
  CHECK(g.layers[0].weight(0, 0) == doctest::Approx((w * x - t) * x).epsilon(1e-14));
  CHECK(g.layers[0].bias(0) == doctest::Approx(w * x - t).epsilon(1e-14));
  // Numeric check of the same derivative.
  const double h = 1e-6;
  auto loss = [&](double ww) { return 0.5 * (ww * x - t) * (ww * x - t); };
  CHECK(g.layers[0].weight(0, 0) == doctest::Approx((loss(w + h) - loss(w - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("backward: dead relu layer has zero weight gradient") {
  Layer l{Matrix::Constant(2, 2, 1.0), Vector::Constant(2, -10.0), Activation::relu};
  DenseNet net("dead", {l}, 0);
  Rng rng(4);
  auto cache = forward(net, testutil::uniform(3, 2, rng));
  auto g = backward(net, cache, Matrix::Ones(3, 2));
  CHECK(g.layers[0].weight.isZero());
}

TEST_CASE("backward: stale cache is refused") {
  auto net = DenseNet::init("n", make_chain({2, 2}, Activation::linear, Activation::linear), 1);
  auto cache = forward(net, Matrix::Ones(1, 2));
  net.mutable_layers()[0].bias(0) = 1.0;
  CHECK_THROWS_AS(backward(net, cache, Matrix::Ones(1, 2)), Error);
  auto other = DenseNet::init("m", make_chain({2, 2}, Activation::linear, Activation::linear), 1);
  CHECK_THROWS_AS(backward(other, forward(net, Matrix::Ones(1, 2)), Matrix::Ones(1, 2)), Error);
}

TEST_CASE("backward: analytic gradients match central differences") {
  auto res = gradcheck::run(30, 5, 2024);
  INFO("worst: " << res.worst);
  CHECK(res.max_rel_error <= 1e-4);
  CHECK(res.activations.size() == 5);
  CHECK(res.losses.size() == 7);
}

TEST_CASE("sgd: lr 0.1, w 1, g 1 gives 0.9") {
  auto net = single(1.0, 0.0, Activation::linear);
  Gradients g;
  g.layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1)});
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::sgd;
  cfg.learning_rate = 0.1;
  Optimizer opt(cfg);
  opt.step(net, g);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(opt.steps() == 1);
}

TEST_CASE("adam: first step moves each parameter by about lr whatever the scale") {
  for (double scale : {1e-3, 1.0, 1e3}) {
    auto net = single(0.5, 0.25, Activation::linear);
    Gradients g;
    g.layers.push_back({Matrix::Constant(1, 1, scale), Vector::Constant(1, -scale)});
    OptimizerConfig cfg;
    cfg.learning_rate = 0.01;
    Optimizer opt(cfg);
    opt.step(net, g);
    // m_hat = g, v_hat = g^2, update = lr g / (|g| + eps)
    const double expect = 0.01 * scale / (scale + cfg.epsilon);
    CHECK(0.5 - net.layers()[0].weight(0, 0) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(net.layers()[0].bias(0) - 0.25 == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("zero gradient leaves sgd parameters unchanged and adam at rest") {
  auto zero = [] {
    Gradients g;
    g.layers.push_back({Matrix::Zero(1, 1), Vector::Zero(1)});
    return g;
  };
  auto net = single(0.3, 0.1, Activation::linear);
  OptimizerConfig sgd;
  sgd.kind = OptimizerKind::sgd;
  Optimizer(sgd).step(net, zero());
  CHECK(net.layers()[0].weight(0, 0) == 0.3);
  Optimizer adam{OptimizerConfig{}};
  for (int i = 0; i < 5; ++i) adam.step(net, zero());
  CHECK(std::abs(net.layers()[0].weight(0, 0) - 0.3) <= 1e-12);
}

TEST_CASE("non-finite gradient names the tensor and leaves the net untouched") {
  auto net = DenseNet::init("disc", make_chain({2, 3, 1}, Activation::relu, Activation::sigmoid), 1);
  auto before = serialize_weights(net);
  auto g = zero_gradients(net);
  g.layers[1].bias(0) = std::numeric_limits<double>::quiet_NaN();
  Optimizer opt;
  try {
    opt.step(net, g);
    FAIL("expected numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()).find("disc.layer1.bias") != std::string::npos);
  }
  CHECK(serialize_weights(net) == before);
}

TEST_CASE("init: Xavier bound, zero bias, determinism") {
  auto a = DenseNet::init("x", make_chain({100, 100}, Activation::linear, Activation::linear), 17);
  auto b = DenseNet::init("x", make_chain({100, 100}, Activation::linear, Activation::linear), 17);
  auto c = DenseNet::init("x", make_chain({100, 100}, Activation::linear, Activation::linear), 18);
  const double bound = std::sqrt(6.0 / 200.0);
  CHECK(a.layers()[0].weight.cwiseAbs().maxCoeff() <= bound);
  CHECK(a.layers()[0].weight.cwiseAbs().maxCoeff() > 0.9 * bound);
  CHECK(a.layers()[0].bias.isZero());
  CHECK(serialize_weights(a) == serialize_weights(b));
  CHECK(!(serialize_weights(a) == serialize_weights(c)));
  CHECK_THROWS_AS(DenseNet::init("bad", {{3, 0, Activation::linear}}, 1), Error);
}

TEST_CASE("weights: round-trip is bit exact and shape checked") {
  auto arch = make_chain({4, 8, 3}, Activation::tanh, Activation::sigmoid);
  auto net = DenseNet::init("rt", arch, 99);
  auto w = serialize_weights(net);
  auto bytes = encode_weights(w);
  auto back = deserialize_weights(decode_weights(bytes), arch, "rt");
  CHECK(serialize_weights(back) == w);
  CHECK(encode_weights(serialize_weights(back)) == bytes);
  CHECK_THROWS_AS(deserialize_weights(w, make_chain({4, 7, 3}, Activation::tanh, Activation::sigmoid), "x"), Error);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_weights(bytes), Error);
}

TEST_CASE("weights: golden hash of a fixed net") {
  auto net = DenseNet::init("golden", make_chain({5, 4, 2}, Activation::leaky_relu, Activation::sigmoid), 20260101);
  CHECK(weights_fingerprint(serialize_weights(net)) == GOLDEN_HASH);
}

TEST_CASE("sgd lowers the loss on a separable task") {
  Rng rng(12);
  Matrix x = testutil::uniform(64, 2, rng);
  Matrix y(64, 1);
  for (Eigen::Index r = 0; r < 64; ++r) y(r, 0) = x(r, 0) + x(r, 1) > 1.0 ? 1.0 : 0.0;
  auto net = DenseNet::init("clf", make_chain({2, 8, 1}, Activation::tanh, Activation::sigmoid), 3);
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::sgd;
  cfg.learning_rate = 0.5;
  Optimizer opt(cfg);
  const double initial = binary_cross_entropy(predict(net, x), y).value;
  for (int s = 0; s < 200; ++s) {
    auto cache = forward(net, x);
    auto l = binary_cross_entropy(cache.output(), y);
    opt.step(net, backward(net, cache, l.grad, GradAt::preactivation));
  }
  CHECK(binary_cross_entropy(predict(net, x), y).value < initial);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto run = [] {
    Rng rng(5);
    Matrix x = testutil::uniform(16, 3, rng);
    auto net = DenseNet::init("d", make_chain({3, 4, 3}, Activation::relu, Activation::sigmoid), 8);
    Optimizer opt;
    for (int s = 0; s < 20; ++s) {
      auto cache = forward(net, x);
      opt.step(net, backward(net, cache, mean_squared(cache.output(), x).grad));
    }
    return serialize_weights(net);
  };
  CHECK(run() == run());
}
