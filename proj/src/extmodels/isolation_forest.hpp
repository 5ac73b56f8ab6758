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

#include <cstdint>
#include <span>
#include <vector>

#include "common/bytes.hpp"
#include "common/matrix.hpp"
#include "common/random.hpp"

namespace ddoslab::extmodels {

// Expected path length of an unsuccessful BST search over n points,
// c(n) = 2 H(n-1) - 2 (n-1) / n; c(1) = 0, c(2) = 1.
double average_path_length(double n);

struct IsoNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double split = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint64_t size = 0;  // rows that reached a leaf
};

struct IsoTree {
  std::vector<IsoNode> nodes;  // nodes[0] is the root

  // Depth of the leaf reached by x plus c(leaf size).
  double path_length(std::span<const double> x) const;
  std::size_t height() const;
};

// Trees grown together on subsamples of one population.
struct IsoGroup {
  std::vector<IsoTree> trees;
  std::size_t sample_size = 256;
  std::size_t trained_rows = 0;

  double mean_path_length(std::span<const double> x) const;
  // 2^(-E[h(x)] / c(psi)), psi = the subsample size actually used.
  double score(std::span<const double> x) const;
};

struct ForestOptions {
  std::size_t trees = 100;
  std::size_t sample_size = 256;
};

IsoTree grow_tree(const Matrix& x, std::span<const std::size_t> rows, std::size_t height_limit, Rng& rng);
IsoGroup grow_group(const Matrix& x, const ForestOptions& options, Rng& rng);

// Forest made of a pretrained group and any groups appended by incremental
// updates. With groups g0..gk the score is folded as s = s0, then
// s = 0.5 s + 0.5 s_i for each later group.
class IsolationForest {
 public:
  IsolationForest() = default;
  explicit IsolationForest(IsoGroup base) { groups_.push_back(std::move(base)); }

  void append(IsoGroup group) { groups_.push_back(std::move(group)); }
  const std::vector<IsoGroup>& groups() const { return groups_; }
  std::size_t tree_count() const;

  double score(std::span<const double> x) const;
  std::vector<double> score(const Matrix& x) const;

  void encode(ByteWriter& out) const;
  static IsolationForest decode(ByteReader& in);

 private:
  std::vector<IsoGroup> groups_;
};

}  // namespace ddoslab::extmodels
