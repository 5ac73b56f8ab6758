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
#include "netcore/weights.hpp"

#include "common/bytes.hpp"
#include "common/error.hpp"
#include "common/sha256.hpp"

namespace ddoslab::netcore {
namespace {

constexpr std::uint8_t kMagic[4] = {'D', 'D', 'L', 'W'};
// Refuse absurd headers before allocating.
constexpr std::uint64_t kMaxTensorValues = std::uint64_t{1} << 32;

std::string shape_text(const std::vector<std::uint64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

std::vector<std::vector<std::uint64_t>> ModelWeights::shapes() const {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& t : tensors) out.push_back(t.shape);
  return out;
}

ModelWeights serialize_weights(const DenseNet& net) {
  ModelWeights w;
  for (const auto& l : net.layers()) {
    Tensor wt;
    wt.shape = {static_cast<std::uint64_t>(l.weight.rows()), static_cast<std::uint64_t>(l.weight.cols())};
    wt.values.assign(l.weight.data(), l.weight.data() + l.weight.size());  // row-major
    Tensor bt;
    bt.shape = {static_cast<std::uint64_t>(l.bias.size())};
    bt.values.assign(l.bias.data(), l.bias.data() + l.bias.size());
    w.tensors.push_back(std::move(wt));
    w.tensors.push_back(std::move(bt));
  }
  return w;
}

void load_into(DenseNet& net, std::span<const Tensor> tensors) {
  const auto arch = net.architecture();
  require(tensors.size() == 2 * arch.size(), ErrorKind::shape,
          net.name() + ": expected " + std::to_string(2 * arch.size()) + " tensors, got " +
              std::to_string(tensors.size()));
  for (std::size_t k = 0; k < arch.size(); ++k) {
    const std::vector<std::uint64_t> ws = {arch[k].out, arch[k].in};
    const std::vector<std::uint64_t> bs = {arch[k].out};
    require(tensors[2 * k].shape == ws, ErrorKind::shape,
            net.name() + ": layer " + std::to_string(k) + " weight is " + shape_text(tensors[2 * k].shape) +
                ", architecture wants " + shape_text(ws));
    require(tensors[2 * k + 1].shape == bs, ErrorKind::shape,
            net.name() + ": layer " + std::to_string(k) + " bias is " + shape_text(tensors[2 * k + 1].shape) +
                ", architecture wants " + shape_text(bs));
  }
  auto& layers = net.mutable_layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& wt = tensors[2 * k];
    const auto& bt = tensors[2 * k + 1];
    layers[k].weight = Eigen::Map<const Matrix>(wt.values.data(), layers[k].weight.rows(), layers[k].weight.cols());
    layers[k].bias = Eigen::Map<const Vector>(bt.values.data(), layers[k].bias.size());
  }
}

DenseNet deserialize_weights(const ModelWeights& weights, const Architecture& arch, const std::string& name,
                             std::uint64_t seed) {
  std::vector<Layer> layers;
  for (const auto& spec : arch) {
    Layer l;
    l.weight = Matrix::Zero(static_cast<Eigen::Index>(spec.out), static_cast<Eigen::Index>(spec.in));
    l.bias = Vector::Zero(static_cast<Eigen::Index>(spec.out));
    l.activation = spec.activation;
    layers.push_back(std::move(l));
  }
  DenseNet net(name, std::move(layers), seed);
  load_into(net, weights.tensors);
  return net;
}

ModelWeights concat(const std::vector<ModelWeights>& parts) {
  ModelWeights out;
  for (const auto& p : parts) out.tensors.insert(out.tensors.end(), p.tensors.begin(), p.tensors.end());
  return out;
}

std::vector<std::uint8_t> encode_weights(const ModelWeights& weights) {
  ByteWriter w;
  w.put_bytes(kMagic);
  w.put_le(kWeightsFormatVersion, 4);
  w.put_le(weights.tensors.size(), 4);
  for (const auto& t : weights.tensors) {
    std::uint64_t count = 1;
    for (auto d : t.shape) count *= d;
    require(count == t.values.size(), ErrorKind::shape, "encode_weights: tensor values do not match its shape");
    w.put_le(t.shape.size(), 4);
    for (auto d : t.shape) w.put_le(d, 8);
    for (double v : t.values) w.put_f64_le(v);
  }
  return std::move(w).take();
}

ModelWeights decode_weights(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.get_bytes(4);
  require(std::equal(magic.begin(), magic.end(), kMagic), ErrorKind::protocol, "weights: bad magic");
  const auto version = r.get_le(4);
  require(version == kWeightsFormatVersion, ErrorKind::protocol,
          "weights: unsupported format version " + std::to_string(version));
  const auto count = r.get_le(4);
  ModelWeights out;
  for (std::uint64_t i = 0; i < count; ++i) {
    Tensor t;
    const auto rank = r.get_le(4);
    require(rank <= 8, ErrorKind::protocol, "weights: implausible tensor rank");
    std::uint64_t n = 1;
    for (std::uint64_t d = 0; d < rank; ++d) {
      t.shape.push_back(r.get_le(8));
      n *= t.shape.back();
      require(n <= kMaxTensorValues, ErrorKind::protocol, "weights: tensor too large");
    }
    require(r.remaining() >= n * 8, ErrorKind::protocol, "weights: truncated tensor data");
    t.values.resize(n);
    for (auto& v : t.values) v = r.get_f64_le();
    out.tensors.push_back(std::move(t));
  }
  require(r.remaining() == 0, ErrorKind::protocol, "weights: trailing bytes");
  return out;
}

std::string weights_fingerprint(const ModelWeights& weights) { return sha256_hex(encode_weights(weights)); }

void save_net(const DenseNet& net, const std::filesystem::path& path, const Json& extra) {
  const auto w = serialize_weights(net);
  const auto bytes = encode_weights(w);
  write_file_bytes(path.string(), bytes);
  Json manifest{{"name", net.name()},
                {"architecture", architecture_to_json(net.architecture())},
                {"seed", net.seed()},
                {"fingerprint", sha256_hex(bytes)}};
  if (!extra.is_null()) manifest["extra"] = extra;
  write_json_file(path.string() + ".json", manifest);
}

DenseNet load_net(const std::filesystem::path& path) {
  const auto manifest = read_json_file(path.string() + ".json");
  const auto bytes = read_file_bytes(path.string());
  require(sha256_hex(bytes) == manifest.at("fingerprint").get<std::string>(), ErrorKind::data,
          path.string() + ": weights do not match manifest fingerprint");
  return deserialize_weights(decode_weights(bytes), architecture_from_json(manifest.at("architecture")),
                             manifest.at("name").get<std::string>(), manifest.at("seed").get<std::uint64_t>());
}

}  // namespace ddoslab::netcore
