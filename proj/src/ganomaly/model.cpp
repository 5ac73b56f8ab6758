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
#include "ganomaly/model.hpp"

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/sha256.hpp"

namespace ddoslab::ganomaly {

using netcore::Activation;

void GanomalyConfig::validate() const {
  require(input_dim > 0, ErrorKind::config, "ganomaly: input_dim must be positive");
  require(latent_dim > 0, ErrorKind::config, "ganomaly: latent_dim must be positive");
  require(!hidden.empty(), ErrorKind::config, "ganomaly: need at least one hidden layer");
  for (auto h : hidden) require(h > 0, ErrorKind::config, "ganomaly: hidden widths must be positive");
  require(w_adv >= 0 && w_con >= 0 && w_enc >= 0 && (w_adv + w_con + w_enc) > 0, ErrorKind::config,
          "ganomaly: loss weights must be non-negative and not all zero");
  require(learning_rate > 0, ErrorKind::config, "ganomaly: learning_rate must be positive");
  require(batch_size > 0, ErrorKind::config, "ganomaly: batch_size must be positive");
}

Json GanomalyConfig::to_json() const {
  return Json{{"input_dim", input_dim}, {"latent_dim", latent_dim}, {"hidden", hidden},
              {"w_adv", w_adv},         {"w_con", w_con},           {"w_enc", w_enc},
              {"learning_rate", learning_rate}, {"beta1", beta1},   {"beta2", beta2},
              {"batch_size", batch_size}};
}

GanomalyConfig GanomalyConfig::from_json(const Json& j, std::size_t input_dim) {
  GanomalyConfig c;
  try {
    c.input_dim = j.value("input_dim", input_dim);
    if (input_dim != 0) c.input_dim = input_dim;
    c.latent_dim = j.value("latent_dim", c.latent_dim);
    c.hidden = j.value("hidden", c.hidden);
    c.w_adv = j.value("w_adv", c.w_adv);
    c.w_con = j.value("w_con", c.w_con);
    c.w_enc = j.value("w_enc", c.w_enc);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.batch_size = j.value("batch_size", c.batch_size);
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, std::string("ganomaly config: ") + e.what());
  }
  return c;
}

GanomalyArch make_arch(const GanomalyConfig& c) {
  c.validate();
  std::vector<std::size_t> enc = {c.input_dim};
  enc.insert(enc.end(), c.hidden.begin(), c.hidden.end());
  enc.push_back(c.latent_dim);

  std::vector<std::size_t> dec = {c.latent_dim};
  dec.insert(dec.end(), c.hidden.rbegin(), c.hidden.rend());
  dec.push_back(c.input_dim);

  std::vector<std::size_t> disc = {c.input_dim};
  disc.insert(disc.end(), c.hidden.begin(), c.hidden.end());
  disc.push_back(1);

  return GanomalyArch{netcore::make_chain(enc, Activation::leaky_relu, Activation::linear),
                      netcore::make_chain(dec, Activation::relu, Activation::sigmoid),
                      netcore::make_chain(disc, Activation::leaky_relu, Activation::sigmoid)};
}

std::string architecture_hash(const GanomalyConfig& config, const std::vector<std::string>& columns) {
  Json doc{{"config", config.to_json()}, {"columns", columns}};
  return sha256_hex(doc.dump());
}

GanomalyModel GanomalyModel::create(const GanomalyConfig& config, std::uint64_t seed) {
  const auto arch = make_arch(config);
  GanomalyModel m;
  m.config = config;
  m.ge = netcore::DenseNet::init("GE", arch.encoder, derive_seed(seed, "ganomaly.GE", 0));
  m.gd = netcore::DenseNet::init("GD", arch.decoder, derive_seed(seed, "ganomaly.GD", 0));
  m.e = netcore::DenseNet::init("E", arch.encoder, derive_seed(seed, "ganomaly.E", 0));
  m.d = netcore::DenseNet::init("D", arch.discriminator, derive_seed(seed, "ganomaly.D", 0));
  m.latent.mean = Vector::Zero(static_cast<Eigen::Index>(config.latent_dim));
  m.latent.second_moment = Matrix::Zero(static_cast<Eigen::Index>(config.latent_dim), static_cast<Eigen::Index>(config.latent_dim));
  return m;
}

netcore::ModelWeights GanomalyModel::weights() const {
  auto w = netcore::concat({netcore::serialize_weights(ge), netcore::serialize_weights(gd),
                            netcore::serialize_weights(e), netcore::serialize_weights(d)});
  const auto z = static_cast<std::uint64_t>(latent.mean.size());
  w.tensors.push_back({{z}, std::vector<double>(latent.mean.data(), latent.mean.data() + z)});
  w.tensors.push_back({{z, z}, std::vector<double>(latent.second_moment.data(), latent.second_moment.data() + z * z)});
  return w;
}

void GanomalyModel::set_weights(const netcore::ModelWeights& w) {
  const std::size_t n_ge = 2 * ge.layers().size();
  const std::size_t n_gd = 2 * gd.layers().size();
  const std::size_t n_e = 2 * e.layers().size();
  const std::size_t n_d = 2 * d.layers().size();
  require(w.tensors.size() == n_ge + n_gd + n_e + n_d + 2, ErrorKind::shape,
          "ganomaly: weight set has " + std::to_string(w.tensors.size()) + " tensors, expected " +
              std::to_string(n_ge + n_gd + n_e + n_d + 2));
  std::span<const netcore::Tensor> all(w.tensors);
  const std::uint64_t z = config.latent_dim;
  require(all[n_ge + n_gd + n_e + n_d].shape == std::vector<std::uint64_t>{z} &&
              all[n_ge + n_gd + n_e + n_d + 1].shape == std::vector<std::uint64_t>{z, z},
          ErrorKind::shape, "ganomaly: latent statistics have the wrong shape");
  // Validate every block before touching any network.
  auto ge2 = ge, gd2 = gd, e2 = e, d2 = d;
  netcore::load_into(ge2, all.subspan(0, n_ge));
  netcore::load_into(gd2, all.subspan(n_ge, n_gd));
  netcore::load_into(e2, all.subspan(n_ge + n_gd, n_e));
  netcore::load_into(d2, all.subspan(n_ge + n_gd + n_e, n_d));
  netcore::load_into(ge, all.subspan(0, n_ge));
  netcore::load_into(gd, all.subspan(n_ge, n_gd));
  netcore::load_into(e, all.subspan(n_ge + n_gd, n_e));
  netcore::load_into(d, all.subspan(n_ge + n_gd + n_e, n_d));
  const auto& mean = all[n_ge + n_gd + n_e + n_d].values;
  const auto& sq = all[n_ge + n_gd + n_e + n_d + 1].values;
  latent.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(z));
  latent.second_moment = Eigen::Map<const Matrix>(sq.data(), static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(z));
}

void save_bundle(const GanomalyModel& model, const std::filesystem::path& dir, const Json& extra) {
  std::filesystem::create_directories(dir);
  netcore::save_net(model.ge, dir / "ge.bin");
  netcore::save_net(model.gd, dir / "gd.bin");
  netcore::save_net(model.e, dir / "e.bin");
  netcore::save_net(model.d, dir / "d.bin");
  Json manifest;
  manifest["format"] = "ddoslab.ganomaly.bundle.v2";
  manifest["config"] = model.config.to_json();
  manifest["loss_weights"] = {{"adv", model.config.w_adv}, {"con", model.config.w_con}, {"enc", model.config.w_enc}};
  manifest["trained_epochs"] = model.trained_epochs;
  manifest["latent_mean"] = std::vector<double>(model.latent.mean.data(), model.latent.mean.data() + model.latent.mean.size());
  manifest["latent_second_moment"] = std::vector<double>(
      model.latent.second_moment.data(), model.latent.second_moment.data() + model.latent.second_moment.size());
  manifest["score_norm"] = model.score_norm ? Json{{"min", model.score_norm->min}, {"max", model.score_norm->max}} : Json(nullptr);
  manifest["fingerprint"] = bundle_fingerprint(model);
  if (!extra.is_null()) manifest["extra"] = extra;
  write_json_file(dir / "manifest.json", manifest);
}

GanomalyModel load_bundle(const std::filesystem::path& dir) {
  const auto manifest = read_json_file(dir / "manifest.json");
  GanomalyModel m;
  m.config = GanomalyConfig::from_json(manifest.at("config"));
  m.config.validate();
  m.ge = netcore::load_net(dir / "ge.bin");
  m.gd = netcore::load_net(dir / "gd.bin");
  m.e = netcore::load_net(dir / "e.bin");
  m.d = netcore::load_net(dir / "d.bin");
  const auto arch = make_arch(m.config);
  require(m.ge.architecture() == arch.encoder && m.e.architecture() == arch.encoder &&
              m.gd.architecture() == arch.decoder && m.d.architecture() == arch.discriminator,
          ErrorKind::shape, dir.string() + ": network shapes do not match the bundle config");
  auto mean = manifest.at("latent_mean").get<std::vector<double>>();
  auto sq = manifest.at("latent_second_moment").get<std::vector<double>>();
  require(mean.size() == m.config.latent_dim && sq.size() == m.config.latent_dim * m.config.latent_dim, ErrorKind::shape,
          dir.string() + ": latent statistics have the wrong size");
  m.latent.mean = Eigen::Map<Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  const auto zd = static_cast<Eigen::Index>(m.config.latent_dim);
  m.latent.second_moment = Eigen::Map<Matrix>(sq.data(), zd, zd);
  m.trained_epochs = manifest.value("trained_epochs", std::size_t{0});
  if (!manifest.at("score_norm").is_null()) {
    m.score_norm = ScoreNorm{manifest["score_norm"].at("min").get<double>(), manifest["score_norm"].at("max").get<double>()};
  }
  return m;
}

std::string bundle_fingerprint(const GanomalyModel& model) {
  Sha256 h;
  h.update(model.config.to_json().dump());
  h.update(netcore::encode_weights(model.weights()));
  h.update_u64(model.trained_epochs);
  return h.hex_digest();
}

}  // namespace ddoslab::ganomaly
