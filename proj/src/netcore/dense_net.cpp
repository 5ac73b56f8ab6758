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
#include "netcore/dense_net.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/random.hpp"

namespace ddoslab::netcore {

const char* to_string(Activation act) {
  switch (act) {
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "linear";
}

Activation activation_from_string(const std::string& name) {
  for (auto a : {Activation::linear, Activation::relu, Activation::leaky_relu, Activation::sigmoid, Activation::tanh}) {
    if (name == to_string(a)) return a;
  }
  fail(ErrorKind::config, "unknown activation '" + name + "'");
}

Architecture make_chain(const std::vector<std::size_t>& dims, Activation hidden, Activation output) {
  require(dims.size() >= 2, ErrorKind::config, "architecture needs at least input and output widths");
  Architecture arch;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    arch.push_back({dims[i], dims[i + 1], i + 2 == dims.size() ? output : hidden});
  }
  return arch;
}

Json architecture_to_json(const Architecture& arch) {
  Json out = Json::array();
  for (const auto& l : arch) out.push_back({{"in", l.in}, {"out", l.out}, {"activation", to_string(l.activation)}});
  return out;
}

Architecture architecture_from_json(const Json& j) {
  Architecture arch;
  for (const auto& l : j) {
    arch.push_back({l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                    activation_from_string(l.at("activation").get<std::string>())});
  }
  return arch;
}

DenseNet::DenseNet(std::string name, std::vector<Layer> layers, std::uint64_t seed)
    : name_(std::move(name)), layers_(std::move(layers)), seed_(seed) {
  require(!layers_.empty(), ErrorKind::shape, name_ + ": network has no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    require(l.bias.size() == l.weight.rows(), ErrorKind::shape,
            name_ + ": layer " + std::to_string(k) + " bias/weight mismatch");
    if (k > 0) {
      require(l.weight.cols() == layers_[k - 1].weight.rows(), ErrorKind::shape,
              name_ + ": layer " + std::to_string(k) + " input does not chain");
    }
  }
}

DenseNet DenseNet::init(const std::string& name, const Architecture& arch, std::uint64_t seed) {
  require(!arch.empty(), ErrorKind::config, name + ": empty architecture");
  Rng rng(derive_seed(seed, "netcore.init." + name, 0));
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < arch.size(); ++k) {
    const auto& spec = arch[k];
    require(spec.in > 0 && spec.out > 0, ErrorKind::config,
            name + ": non-positive width in layer " + std::to_string(k));
    if (k > 0) {
      require(spec.in == arch[k - 1].out, ErrorKind::config, name + ": layer " + std::to_string(k) + " does not chain");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.in + spec.out));
    Layer layer;
    layer.weight.resize(static_cast<Eigen::Index>(spec.out), static_cast<Eigen::Index>(spec.in));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(spec.out));
    layer.activation = spec.activation;
    layers.push_back(std::move(layer));
  }
  return DenseNet(name, std::move(layers), seed);
}

Architecture DenseNet::architecture() const {
  Architecture arch;
  for (const auto& l : layers_) {
    arch.push_back({static_cast<std::size_t>(l.weight.cols()), static_cast<std::size_t>(l.weight.rows()), l.activation});
  }
  return arch;
}

std::size_t DenseNet::input_dim() const { return static_cast<std::size_t>(layers_.front().weight.cols()); }
std::size_t DenseNet::output_dim() const { return static_cast<std::size_t>(layers_.back().weight.rows()); }

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool DenseNet::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

namespace {

void activate(Matrix& z, Activation act) {
  switch (act) {
    case Activation::linear: break;
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::leaky_relu: z = z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; }); break;
    case Activation::sigmoid: z = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }); break;
    case Activation::tanh: z = z.array().tanh().matrix(); break;
  }
}

// dL/dz from dL/dy using the stored output y (relu/leaky keep the sign of z).
Matrix activation_grad(const Matrix& y, const Matrix& grad, Activation act) {
  switch (act) {
    case Activation::linear: return grad;
    case Activation::relu: return (y.array() > 0.0).select(grad, 0.0);
    case Activation::leaky_relu: return (y.array() > 0.0).select(grad, kLeakySlope * grad);
    case Activation::sigmoid: return (grad.array() * y.array() * (1.0 - y.array())).matrix();
    case Activation::tanh: return (grad.array() * (1.0 - y.array().square())).matrix();
  }
  return grad;
}

}  // namespace

ForwardCache forward(const DenseNet& net, const Matrix& batch) {
  require(static_cast<std::size_t>(batch.cols()) == net.input_dim(), ErrorKind::shape,
          net.name() + ": input has " + std::to_string(batch.cols()) + " columns, expected " +
              std::to_string(net.input_dim()));
  ForwardCache cache;
  cache.net = &net;
  cache.generation = net.generation();
  cache.inputs.reserve(net.layers().size());
  cache.outputs.reserve(net.layers().size());
  const Matrix* in = &batch;
  for (const auto& layer : net.layers()) {
    cache.inputs.push_back(*in);
    Matrix z = *in * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    activate(z, layer.activation);
    cache.outputs.push_back(std::move(z));
    in = &cache.outputs.back();
  }
  return cache;
}

Matrix predict(const DenseNet& net, const Matrix& batch) {
  require(static_cast<std::size_t>(batch.cols()) == net.input_dim(), ErrorKind::shape,
          net.name() + ": input has " + std::to_string(batch.cols()) + " columns, expected " +
              std::to_string(net.input_dim()));
  Matrix a = batch;
  for (const auto& layer : net.layers()) {
    Matrix z = a * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    activate(z, layer.activation);
    a = std::move(z);
  }
  return a;
}

Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& loss_grad, GradAt at,
                   std::size_t layer_count) {
  const std::size_t n_layers = layer_count == 0 ? net.layers().size() : layer_count;
  require(cache.net == &net && cache.generation == net.generation(), ErrorKind::state,
          net.name() + ": forward cache is stale or belongs to another network");
  require(n_layers <= net.layers().size() && cache.outputs.size() == net.layers().size(), ErrorKind::state,
          net.name() + ": forward cache does not match the network");
  const Matrix& top = cache.outputs[n_layers - 1];
  require(loss_grad.rows() == top.rows() && loss_grad.cols() == top.cols(), ErrorKind::shape,
          net.name() + ": loss gradient shape does not match layer output");

  Gradients g;
  g.layers.resize(n_layers);
  Matrix grad = loss_grad;
  for (std::size_t k = n_layers; k-- > 0;) {
    const auto& layer = net.layers()[k];
    Matrix dz = (k + 1 == n_layers && at == GradAt::preactivation)
                    ? grad
                    : activation_grad(cache.outputs[k], grad, layer.activation);
    g.layers[k].weight = dz.transpose() * cache.inputs[k];
    g.layers[k].bias = dz.colwise().sum().transpose();
    grad = dz * layer.weight;
  }
  g.input = std::move(grad);
  return g;
}

Gradients zero_gradients(const DenseNet& net) {
  Gradients g;
  for (const auto& l : net.layers()) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

}  // namespace ddoslab::netcore
