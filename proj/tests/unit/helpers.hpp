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

#include <spdlog/spdlog.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "common/matrix.hpp"
#include "common/random.hpp"
#include "flowdata/flow_table.hpp"

namespace testutil {

using ddoslab::Matrix;
using ddoslab::flowdata::FlowTable;
using ddoslab::flowdata::Label;

inline std::vector<std::string> names(std::size_t n, const std::string& prefix = "f") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline FlowTable table(Matrix x, std::vector<Label> labels = {}, std::vector<std::string> cols = {}) {
  if (labels.empty()) labels.assign(static_cast<std::size_t>(x.rows()), Label::benign);
  if (cols.empty()) cols = names(static_cast<std::size_t>(x.cols()));
  return FlowTable(std::move(x), std::move(labels), std::move(cols), {"test", {}, {}, false});
}

inline Matrix gaussian(std::size_t rows, std::size_t cols, double mean, double sd, ddoslab::Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = mean + sd * rng.normal();
  return m;
}

inline Matrix uniform(std::size_t rows, std::size_t cols, ddoslab::Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform();
  return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ddoslab_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

struct QuietLogs {
  QuietLogs() { spdlog::set_level(spdlog::level::err); }
};

}  // namespace testutil
