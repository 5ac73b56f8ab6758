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
#include "pipeline/toy.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "common/error.hpp"
#include "common/matrix.hpp"
#include "common/random.hpp"

namespace ddoslab::pipeline {
namespace {

struct Component {
  double weight = 1.0;
  int protocol = 6;
  std::vector<int> flags;
  Vector mean;
  Matrix chol;  // lower Cholesky factor of the covariance
};

Component parse_component(const Json& j, std::size_t dims) {
  Component c;
  c.weight = j.at("weight").get<double>();
  c.protocol = j.at("protocol").get<int>();
  c.flags = j.at("flags").get<std::vector<int>>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto std = j.at("std").get<std::vector<double>>();
  const double rho = j.value("correlation", 0.0);
  require(mean.size() == dims && std.size() == dims && !c.flags.empty() && c.weight > 0.0, ErrorKind::config,
          "toy preset: malformed mixture component");
  c.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(dims));
  Matrix cov(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(dims));
  for (std::size_t a = 0; a < dims; ++a) {
    for (std::size_t b = 0; b < dims; ++b) {
      cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = (a == b ? 1.0 : rho) * std[a] * std[b];
    }
  }
  Eigen::LLT<Matrix> llt(cov);
  require(llt.info() == Eigen::Success, ErrorKind::config, "toy preset: covariance is not positive definite");
  c.chol = llt.matrixL();
  return c;
}

std::vector<Component> parse_mixture(const Json& j, std::size_t dims) {
  std::vector<Component> out;
  for (const auto& c : j) out.push_back(parse_component(c, dims));
  require(!out.empty(), ErrorKind::config, "toy preset: empty mixture");
  return out;
}

const Component& pick(const std::vector<Component>& mix, Rng& rng) {
  double total = 0.0;
  for (const auto& c : mix) total += c.weight;
  double u = rng.uniform() * total;
  for (const auto& c : mix) {
    if (u < c.weight) return c;
    u -= c.weight;
  }
  return mix.back();
}

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct RawRow {
  std::string text;
};

}  // namespace

ToyPreset ToyPreset::load(const std::filesystem::path& path) {
  ToyPreset p{read_json_file(path)};
  require(p.doc.contains("domains") && p.doc.contains("schema") && p.doc.contains("ddos"), ErrorKind::config,
          "toy preset " + path.string() + ": missing domains/schema/ddos");
  return p;
}

std::filesystem::path ToyPreset::default_path() {
  return std::filesystem::path(DDOSLAB_PRESET_DIR) / "toy_v2.json";
}

std::string ToyPreset::name() const { return doc.value("preset", std::string("toy")); }

flowdata::FlowSchema ToyPreset::schema() const { return flowdata::FlowSchema::from_json(doc.at("schema")); }

std::vector<std::string> ToyPreset::domains() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : doc.at("domains").items()) out.push_back(name);
  return out;
}

bool ToyPreset::labeled(const std::string& domain) const {
  return doc.at("domains").at(domain).value("labeled", false);
}

double ToyPreset::attack_train_fraction(const std::string& domain) const {
  return doc.at("domains").at(domain).value("attack_train_fraction", 0.0);
}

ToyOutput make_toy(const ToyPreset& preset, std::uint64_t seed, const std::filesystem::path& out_dir) {
  const auto continuous = preset.doc.at("continuous").get<std::vector<std::string>>();
  const auto integer_cols = preset.doc.value("integer_columns", std::vector<std::string>{});
  const std::size_t dims = continuous.size();
  std::vector<bool> is_int(dims, false);
  for (std::size_t k = 0; k < dims; ++k) {
    is_int[k] = std::find(integer_cols.begin(), integer_cols.end(), continuous[k]) != integer_cols.end();
  }
  const auto ddos = parse_mixture(preset.doc.at("ddos"), dims);
  const auto schema = preset.schema();  // validates the schema block

  ToyOutput out;
  std::filesystem::create_directories(out_dir / "raw");
  out.schema_path = out_dir / "schema.json";
  write_json_file(out.schema_path, preset.doc.at("schema"));

  for (const auto& domain : preset.domains()) {
    const Json& d = preset.doc.at("domains").at(domain);
    const auto benign = parse_mixture(d.at("mixture"), dims);
    const int subnet = d.value("subnet", 10);
    Rng rng(derive_seed(seed, "toy." + domain, 0));

    auto sample = [&](const Component& c, bool attack, double duration_factor, bool null_cell) {
      Vector z(static_cast<Eigen::Index>(dims));
      for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
      Vector v = c.mean + c.chol * z;
      std::string row;
      row += std::to_string(subnet) + "." + std::to_string(rng.below(256)) + "." + std::to_string(rng.below(256)) +
             "." + std::to_string(1 + rng.below(254));
      row += "," + std::to_string(attack ? 1024 + rng.below(64000) : 1024 + rng.below(30000));
      row += "," + std::to_string(subnet) + ".0.0." + std::to_string(1 + rng.below(attack ? 2 : 50));
      row += "," + std::to_string(attack ? 80 : std::vector<int>{53, 80, 443, 8080, 1883}[rng.below(5)]);
      row += "," + std::to_string(c.protocol);
      row += "," + std::to_string(c.flags[rng.below(c.flags.size())]);
      for (std::size_t k = 0; k < dims; ++k) {
        double x = std::max(0.0, v(static_cast<Eigen::Index>(k)));
        if (k == 0) x *= duration_factor;
        x = is_int[k] ? std::round(x) : std::round(x * 1000.0) / 1000.0;
        if (!attack && is_int[k]) x = std::max(1.0, x);
        row += ",";
        if (!(null_cell && k == 1)) row += num(x);
      }
      row += attack ? ",1" : ",0";
      return row;
    };

    std::vector<std::string> rows;
    const auto n_benign = d.at("benign_rows").get<std::size_t>();
    const auto n_ddos = d.at("ddos_rows").get<std::size_t>();
    for (std::size_t i = 0; i < n_benign; ++i) rows.push_back(sample(pick(benign, rng), false, 1.0, false));
    for (std::size_t i = 0; i < n_ddos; ++i) rows.push_back(sample(pick(ddos, rng), true, 1.0, false));
    // Dirty rows exercise the cleaning step.
    for (std::size_t i = 0; i < d.value("null_rows", std::size_t{0}); ++i) {
      rows.push_back(sample(pick(benign, rng), false, 1.0, true));
    }
    for (std::size_t i = 0; i < d.value("outlier_rows", std::size_t{0}); ++i) {
      rows.push_back(sample(pick(benign, rng), false, 60.0, false));
    }
    rng.shuffle(rows);

    const auto path = out_dir / "raw" / (domain + ".csv");
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path.string());
    f << "src_ip,src_port,dst_ip,dst_port,protocol,tcp_flags";
    for (const auto& c : continuous) f << "," << c;
    f << "," << schema.label_column() << "\n";
    for (const auto& r : rows) f << r << "\n";
    require(static_cast<bool>(f), ErrorKind::io, "write failed for " + path.string());
    out.csv[domain] = path;
  }
  return out;
}

}  // namespace ddoslab::pipeline
