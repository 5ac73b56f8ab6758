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
#include "extmodels/external_model.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/bytes.hpp"
#include "common/error.hpp"
#include "common/sha256.hpp"
#include "common/stats.hpp"
#include "flowdata/csv.hpp"
#include "netcore/losses.hpp"
#include "netcore/optimizer.hpp"
#include "netcore/weights.hpp"

namespace ddoslab::extmodels {
namespace {

constexpr char kMagic[8] = {'D', 'D', 'L', 'X', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kContainerVersion = 1;

Matrix gather(const Matrix& x, std::span<const std::size_t> order, std::size_t start, std::size_t n) {
  Matrix out(static_cast<Eigen::Index>(n), x.cols());
  for (std::size_t i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(order[start + i]));
  return out;
}

std::vector<std::size_t> iota_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

netcore::OptimizerConfig adam(double lr) {
  netcore::OptimizerConfig c;
  c.kind = netcore::OptimizerKind::adam;
  c.learning_rate = lr;
  return c;
}

void put_blob(ByteWriter& w, const std::vector<std::uint8_t>& blob) {
  w.put_le(blob.size(), 8);
  w.put_bytes(blob);
}

std::span<const std::uint8_t> get_blob(ByteReader& r) { return r.get_bytes(r.get_le(8)); }

void check_columns(const std::vector<std::string>& expected, const flowdata::FlowTable& table, const std::string& what) {
  if (table.column_names() != expected) {
    fail(ErrorKind::shape, what + ": feature columns differ from the pretraining schema (" +
                               std::to_string(table.cols()) + " vs " + std::to_string(expected.size()) + " columns)");
  }
}

}  // namespace

const char* to_string(ExternalKind kind) {
  return kind == ExternalKind::isolation_forest ? "isolation_forest" : "mlp_classifier";
}

ExternalKind external_kind_from_string(const std::string& name) {
  if (name == "isolation_forest" || name == "iforest") return ExternalKind::isolation_forest;
  if (name == "mlp_classifier" || name == "mlp") return ExternalKind::mlp_classifier;
  fail(ErrorKind::config, "unknown external model kind '" + name + "' (isolation_forest|mlp_classifier)");
}

void SyntheticBundle::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  flowdata::write_table_csv(table, dir / "synthetic.csv");
  write_json_file(dir / "audit.json", audit.to_json());
  write_json_file(dir / "bundle.json", Json{{"generator_fingerprint", generator_fingerprint},
                                            {"rows", table.rows()},
                                            {"table_fingerprint", table.fingerprint()},
                                            {"provenance", table.provenance().to_json()}});
}

SyntheticBundle SyntheticBundle::load(const std::filesystem::path& dir) {
  const auto meta = read_json_file(dir / "bundle.json");
  auto table = flowdata::read_table_csv(dir / "synthetic.csv");
  table = table.with_provenance(flowdata::Provenance::from_json(meta.at("provenance")));
  require(table.fingerprint() == meta.at("table_fingerprint").get<std::string>(), ErrorKind::data,
          "synthetic bundle " + dir.string() + ": synthetic.csv does not match bundle.json fingerprint");
  return SyntheticBundle{std::move(table), ganomaly::AuditReport::from_json(read_json_file(dir / "audit.json")),
                         meta.at("generator_fingerprint").get<std::string>()};
}

Json PretrainConfig::to_json() const {
  return Json{{"seed", seed},
              {"max_violation_ratio", max_violation_ratio},
              {"q", q},
              {"forest", {{"trees", forest.trees}, {"sample_size", forest.sample_size}}},
              {"mlp",
               {{"hidden", mlp.hidden},
                {"epochs", mlp.epochs},
                {"batch_size", mlp.batch_size},
                {"learning_rate", mlp.learning_rate}}}};
}

PretrainConfig PretrainConfig::from_json(const Json& j) {
  PretrainConfig c;
  c.seed = j.value("seed", c.seed);
  c.max_violation_ratio = j.value("max_violation_ratio", c.max_violation_ratio);
  c.q = j.value("q", c.q);
  if (j.contains("forest")) {
    c.forest.trees = j["forest"].value("trees", c.forest.trees);
    c.forest.sample_size = j["forest"].value("sample_size", c.forest.sample_size);
  }
  if (j.contains("mlp")) {
    const auto& m = j["mlp"];
    c.mlp.hidden = m.value("hidden", c.mlp.hidden);
    c.mlp.epochs = m.value("epochs", c.mlp.epochs);
    c.mlp.batch_size = m.value("batch_size", c.mlp.batch_size);
    c.mlp.learning_rate = m.value("learning_rate", c.mlp.learning_rate);
  }
  require(c.max_violation_ratio >= 0.0 && c.max_violation_ratio <= 1.0, ErrorKind::config,
          "pretrain: max_violation_ratio must lie in [0,1]");
  require(c.q > 0.0 && c.q < 1.0, ErrorKind::config, "pretrain: q must lie in (0,1)");
  require(!c.mlp.hidden.empty() && c.mlp.batch_size >= 1, ErrorKind::config, "pretrain: bad mlp options");
  return c;
}

Json FineTuneConfig::to_json() const {
  return Json{{"seed", seed},
              {"epochs", epochs},
              {"batch_size", batch_size},
              {"learning_rate", learning_rate},
              {"q", q},
              {"forest", {{"trees", forest.trees}, {"sample_size", forest.sample_size}}}};
}

FineTuneConfig FineTuneConfig::from_json(const Json& j) {
  FineTuneConfig c;
  c.seed = j.value("seed", c.seed);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.q = j.value("q", c.q);
  if (j.contains("forest")) {
    c.forest.trees = j["forest"].value("trees", c.forest.trees);
    c.forest.sample_size = j["forest"].value("sample_size", c.forest.sample_size);
  }
  require(c.batch_size >= 1, ErrorKind::config, "fine-tune: batch_size must be at least 1");
  require(c.q > 0.0 && c.q < 1.0, ErrorKind::config, "fine-tune: q must lie in (0,1)");
  return c;
}

Matrix ExternalModel::scaled(const flowdata::FlowTable& table) const {
  check_columns(scaler_.columns, table, "external model");
  return flowdata::apply_scaler(table.features(), scaler_);
}

std::vector<double> ExternalModel::reconstruction_errors(const Matrix& x) const {
  const Matrix recon = netcore::predict(decoder_, netcore::predict(encoder_, x));
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = (recon.row(r) - x.row(r)).squaredNorm() / static_cast<double>(x.cols());
  }
  return out;
}

std::vector<double> ExternalModel::score(const flowdata::FlowTable& table) const {
  const Matrix x = scaled(table);
  if (kind_ == ExternalKind::isolation_forest) return forest_.score(x);
  if (head_) {
    const Matrix p = netcore::predict(*head_, netcore::predict(encoder_, x));
    return std::vector<double>(p.data(), p.data() + p.size());
  }
  auto err = reconstruction_errors(x);
  const double span = error_max_ - error_min_;
  for (auto& e : err) e = span > 0.0 ? std::clamp((e - error_min_) / span, 0.0, 1.0) : 0.0;
  return err;
}

Json ExternalModel::manifest() const {
  Json log = Json::array();
  for (const auto& e : fine_tune_log_) {
    log.push_back({{"batch_size", e.batch_size}, {"batches", e.batches}, {"metric", e.metric}, {"value", e.value}});
  }
  Json j{{"kind", to_string(kind_)},
         {"scaler", scaler_.to_json()},
         {"threshold", threshold_},
         {"pretrain_fingerprint", pretrain_fingerprint_},
         {"seed", seed_},
         {"fine_tune_log", log}};
  if (kind_ == ExternalKind::mlp_classifier) {
    j["encoder"] = netcore::architecture_to_json(encoder_.architecture());
    j["decoder"] = netcore::architecture_to_json(decoder_.architecture());
    j["head"] = head_ ? netcore::architecture_to_json(head_->architecture()) : Json();
    j["error_norm"] = {error_min_, error_max_};
  } else {
    j["trees"] = forest_.tree_count();
  }
  return j;
}

std::vector<std::uint8_t> ExternalModel::encode() const {
  ByteWriter blob;
  if (kind_ == ExternalKind::isolation_forest) {
    forest_.encode(blob);
  } else {
    put_blob(blob, netcore::encode_weights(netcore::serialize_weights(encoder_)));
    put_blob(blob, netcore::encode_weights(netcore::serialize_weights(decoder_)));
    if (head_) put_blob(blob, netcore::encode_weights(netcore::serialize_weights(*head_)));
  }
  const std::string text = manifest().dump();
  ByteWriter w;
  w.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), sizeof kMagic));
  w.put_le(kContainerVersion, 4);
  w.put_le(text.size(), 4);
  w.put_text(text);
  put_blob(w, blob.bytes());
  return std::move(w).take();
}

ExternalModel ExternalModel::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.get_bytes(sizeof kMagic);
  require(std::equal(magic.begin(), magic.end(), reinterpret_cast<const std::uint8_t*>(kMagic)), ErrorKind::data,
          "not an external model container (bad magic)");
  const auto version = r.get_le(4);
  require(version == kContainerVersion, ErrorKind::data,
          "unsupported external model container version " + std::to_string(version));
  auto text = r.get_bytes(r.get_le(4));
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    fail(ErrorKind::data, std::string("external model manifest: ") + e.what());
  }
  auto blob = get_blob(r);
  require(r.remaining() == 0, ErrorKind::data, "external model container: trailing bytes");

  ExternalModel m;
  m.kind_ = external_kind_from_string(j.at("kind").get<std::string>());
  m.scaler_ = flowdata::ScalerParams::from_json(j.at("scaler"));
  m.threshold_ = j.at("threshold").get<double>();
  m.pretrain_fingerprint_ = j.at("pretrain_fingerprint").get<std::string>();
  m.seed_ = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("fine_tune_log")) {
    m.fine_tune_log_.push_back({e.at("batch_size").get<std::size_t>(), e.at("batches").get<std::size_t>(),
                                e.at("metric").get<std::string>(), e.at("value").get<double>()});
  }
  ByteReader b(blob);
  if (m.kind_ == ExternalKind::isolation_forest) {
    m.forest_ = IsolationForest::decode(b);
    for (const auto& g : m.forest_.groups()) {
      for (const auto& t : g.trees) {
        for (const auto& n : t.nodes) {
          require(n.feature < static_cast<std::int32_t>(m.scaler_.columns.size()), ErrorKind::data,
                  "isolation forest: split feature out of range");
        }
      }
    }
  } else {
    auto load = [&](const Json& arch, const std::string& name) {
      return netcore::deserialize_weights(netcore::decode_weights(get_blob(b)), netcore::architecture_from_json(arch),
                                          name, m.seed_);
    };
    m.encoder_ = load(j.at("encoder"), "external.encoder");
    m.decoder_ = load(j.at("decoder"), "external.decoder");
    if (!j.at("head").is_null()) m.head_ = load(j.at("head"), "external.head");
    m.error_min_ = j.at("error_norm").at(0).get<double>();
    m.error_max_ = j.at("error_norm").at(1).get<double>();
  }
  require(b.remaining() == 0, ErrorKind::data, "external model blob: trailing bytes");
  return m;
}

void ExternalModel::save(const std::filesystem::path& path) const { write_file_bytes(path.string(), encode()); }

ExternalModel ExternalModel::load(const std::filesystem::path& path) { return decode(read_file_bytes(path.string())); }

std::string ExternalModel::fingerprint() const { return sha256_hex(encode()); }

ExternalModel pretrain(ExternalKind kind, const SyntheticBundle& bundle, const PretrainConfig& config) {
  require(!bundle.table.empty(), ErrorKind::precondition, "pretrain: synthetic bundle is empty");
  require(bundle.table.count(flowdata::Label::ddos) == 0, ErrorKind::precondition,
          "pretrain: synthetic bundle must be benign-only");
  const double ratio = bundle.audit.violation_ratio();
  if (ratio > config.max_violation_ratio) {
    fail(ErrorKind::data, "pretrain refused: audit violation ratio " + std::to_string(ratio) + " exceeds cap " +
                              std::to_string(config.max_violation_ratio) + "; audit: " + bundle.audit.to_json().dump());
  }

  ExternalModel m;
  m.kind_ = kind;
  m.seed_ = config.seed;
  m.scaler_ = flowdata::fit_scaler(bundle.table);
  m.pretrain_fingerprint_ = bundle.table.fingerprint();
  const Matrix x = flowdata::apply_scaler(bundle.table.features(), m.scaler_);
  Rng rng(derive_seed(config.seed, std::string("extmodels.pretrain.") + to_string(kind), 0));

  if (kind == ExternalKind::isolation_forest) {
    m.forest_ = IsolationForest(grow_group(x, config.forest, rng));
    m.threshold_ = quantile(m.forest_.score(x), config.q);
    return m;
  }

  std::vector<std::size_t> dims{static_cast<std::size_t>(x.cols())};
  dims.insert(dims.end(), config.mlp.hidden.begin(), config.mlp.hidden.end());
  std::vector<std::size_t> back(dims.rbegin(), dims.rend());
  auto enc_arch = netcore::make_chain(dims, netcore::Activation::leaky_relu, netcore::Activation::leaky_relu);
  auto dec_arch = netcore::make_chain(back, netcore::Activation::leaky_relu, netcore::Activation::sigmoid);
  m.encoder_ = netcore::DenseNet::init("external.encoder", enc_arch, config.seed);
  m.decoder_ = netcore::DenseNet::init("external.decoder", dec_arch, config.seed);

  netcore::Optimizer enc_opt(adam(config.mlp.learning_rate));
  netcore::Optimizer dec_opt(adam(config.mlp.learning_rate));
  auto order = iota_order(static_cast<std::size_t>(x.rows()));
  for (std::size_t epoch = 0; epoch < config.mlp.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.mlp.batch_size) {
      const auto n = std::min(config.mlp.batch_size, order.size() - start);
      const Matrix batch = gather(x, order, start, n);
      auto enc = netcore::forward(m.encoder_, batch);
      auto dec = netcore::forward(m.decoder_, enc.output());
      auto loss = netcore::mean_squared(dec.output(), batch);
      require(std::isfinite(loss.value), ErrorKind::numeric, "external mlp: non-finite reconstruction loss");
      auto g_dec = netcore::backward(m.decoder_, dec, loss.grad);
      auto g_enc = netcore::backward(m.encoder_, enc, g_dec.input);
      dec_opt.step(m.decoder_, g_dec);
      enc_opt.step(m.encoder_, g_enc);
      total += loss.value;
      ++batches;
    }
    spdlog::debug("external mlp pretrain epoch {}: mse {:.6f}", epoch, total / static_cast<double>(batches));
  }
  const auto errors = m.reconstruction_errors(x);
  m.error_min_ = *std::min_element(errors.begin(), errors.end());
  m.error_max_ = *std::max_element(errors.begin(), errors.end());
  std::vector<double> norm = m.score(bundle.table);
  m.threshold_ = quantile(norm, config.q);
  return m;
}

ExternalModel fine_tune(const ExternalModel& model, const flowdata::FlowTable& local, const FineTuneConfig& config) {
  check_columns(model.columns(), local, "fine-tune");
  ExternalModel m = model;
  if (local.empty()) return m;
  const auto generation = m.fine_tune_log_.size();
  Rng rng(derive_seed(config.seed, std::string("extmodels.finetune.") + to_string(m.kind_), generation));

  if (m.kind_ == ExternalKind::isolation_forest) {
    if (config.forest.trees == 0) return m;
    const auto benign = local.filter(flowdata::Label::benign);
    require(!benign.empty(), ErrorKind::precondition, "fine-tune: forest needs benign local rows");
    const Matrix x = m.scaled(benign);
    m.forest_.append(grow_group(x, config.forest, rng));
    m.threshold_ = quantile(m.forest_.score(x), config.q);
    m.fine_tune_log_.push_back({std::min(config.forest.sample_size, benign.rows()), config.forest.trees,
                                "benign_score_q", m.threshold_});
    return m;
  }

  if (config.epochs == 0) return m;
  require(local.count(flowdata::Label::ddos) > 0 && local.count(flowdata::Label::benign) > 0,
          ErrorKind::precondition, "fine-tune: mlp_classifier needs both classes in the local data");
  if (!m.head_) {
    const auto code = m.encoder_.output_dim();
    m.head_ = netcore::DenseNet::init(
        "external.head", netcore::make_chain({code, 1}, netcore::Activation::linear, netcore::Activation::sigmoid),
        derive_seed(config.seed, "extmodels.head", 0));
  }
  const Matrix x = m.scaled(local);
  Matrix y(x.rows(), 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    y(r, 0) = local.labels()[static_cast<std::size_t>(r)] == flowdata::Label::ddos ? 1.0 : 0.0;
  }
  netcore::Optimizer enc_opt(adam(config.learning_rate));
  netcore::Optimizer head_opt(adam(config.learning_rate));
  auto order = iota_order(static_cast<std::size_t>(x.rows()));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto n = std::min(config.batch_size, order.size() - start);
      const Matrix xb = gather(x, order, start, n);
      const Matrix yb = gather(y, order, start, n);
      auto enc = netcore::forward(m.encoder_, xb);
      auto head = netcore::forward(*m.head_, enc.output());
      auto loss = netcore::binary_cross_entropy(head.output(), yb);
      require(std::isfinite(loss.value), ErrorKind::numeric, "external mlp: non-finite classification loss");
      auto g_head = netcore::backward(*m.head_, head, loss.grad, netcore::GradAt::preactivation);
      auto g_enc = netcore::backward(m.encoder_, enc, g_head.input);
      head_opt.step(*m.head_, g_head);
      enc_opt.step(m.encoder_, g_enc);
      total += loss.value;
      ++batches;
    }
    m.fine_tune_log_.push_back({config.batch_size, batches, "bce", total / static_cast<double>(batches)});
  }
  m.threshold_ = 0.5;
  return m;
}

std::map<std::string, evalkit::EvalReport> evaluate_unseen(const ExternalModel& model, const std::string& model_id,
                                                           const std::map<std::string, flowdata::FlowTable>& tests) {
  std::vector<std::string> bad;
  for (const auto& [name, table] : tests) {
    if (table.column_names() != model.columns()) bad.push_back(name);
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
    fail(ErrorKind::shape, "evaluate_unseen: schema mismatch for domain(s): " + list);
  }
  std::map<std::string, evalkit::EvalReport> out;
  for (const auto& [name, table] : tests) {
    auto report = evalkit::evaluate(model, table, model.threshold(), model_id, name);
    report.scaler_owner = "synthetic";
    out.emplace(name, std::move(report));
  }
  return out;
}

}  // namespace ddoslab::extmodels
