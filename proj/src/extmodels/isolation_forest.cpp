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
#include "extmodels/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace ddoslab::extmodels {

double average_path_length(double n) {
  if (n <= 1.0) return 0.0;
  if (n <= 2.0) return 1.0;
  constexpr double kEulerGamma = 0.5772156649015329;
  const double harmonic = std::log(n - 1.0) + kEulerGamma;
  return 2.0 * harmonic - 2.0 * (n - 1.0) / n;
}

double IsoTree::path_length(std::span<const double> x) const {
  std::size_t depth = 0;
  std::int32_t at = 0;
  for (;;) {
    const IsoNode& node = nodes[static_cast<std::size_t>(at)];
    if (node.feature < 0) return static_cast<double>(depth) + average_path_length(static_cast<double>(node.size));
    at = x[static_cast<std::size_t>(node.feature)] < node.split ? node.left : node.right;
    ++depth;
  }
}

std::size_t IsoTree::height() const {
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (nodes[i].feature >= 0) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return best;
}

namespace {

std::int32_t grow(IsoTree& tree, const Matrix& x, std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                  std::size_t depth, std::size_t limit, Rng& rng) {
  const auto index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  const std::size_t n = end - begin;
  auto make_leaf = [&] {
    tree.nodes[static_cast<std::size_t>(index)].size = n;
    return index;
  };
  if (n <= 1 || depth >= limit) return make_leaf();

  // Only features that still vary within this node can split it.
  std::vector<std::size_t> candidates;
  std::vector<std::pair<double, double>> ranges(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double lo = x(static_cast<Eigen::Index>(rows[begin]), c), hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = x(static_cast<Eigen::Index>(rows[i]), c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ranges[static_cast<std::size_t>(c)] = {lo, hi};
    if (hi > lo) candidates.push_back(static_cast<std::size_t>(c));
  }
  if (candidates.empty()) return make_leaf();

  const std::size_t feature = candidates[rng.below(candidates.size())];
  const auto [lo, hi] = ranges[feature];
  double split = rng.uniform(lo, hi);
  if (split <= lo) split = std::nextafter(lo, hi);  // keep both sides non-empty
  auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin), rows.begin() + static_cast<std::ptrdiff_t>(end),
                            [&](std::size_t r) { return x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(feature)) < split; });
  const std::size_t cut = static_cast<std::size_t>(mid - rows.begin());

  const std::int32_t left = grow(tree, x, rows, begin, cut, depth + 1, limit, rng);
  const std::int32_t right = grow(tree, x, rows, cut, end, depth + 1, limit, rng);
  IsoNode& node = tree.nodes[static_cast<std::size_t>(index)];
  node.feature = static_cast<std::int32_t>(feature);
  node.split = split;
  node.left = left;
  node.right = right;
  return index;
}

}  // namespace

IsoTree grow_tree(const Matrix& x, std::span<const std::size_t> rows, std::size_t height_limit, Rng& rng) {
  require(!rows.empty(), ErrorKind::precondition, "isolation tree: no rows");
  IsoTree tree;
  std::vector<std::size_t> work(rows.begin(), rows.end());
  grow(tree, x, work, 0, work.size(), 0, height_limit, rng);
  return tree;
}

IsoGroup grow_group(const Matrix& x, const ForestOptions& options, Rng& rng) {
  require(x.rows() > 0, ErrorKind::precondition, "isolation forest: no training rows");
  require(options.trees >= 1 && options.sample_size >= 2, ErrorKind::config,
          "isolation forest: need trees >= 1 and sample_size >= 2");
  IsoGroup group;
  const auto n = static_cast<std::size_t>(x.rows());
  group.sample_size = std::min(options.sample_size, n);
  group.trained_rows = n;
  const auto limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(group.sample_size, 2)))));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t t = 0; t < options.trees; ++t) {
    // Partial Fisher-Yates: the first sample_size entries are a uniform subsample.
    for (std::size_t i = 0; i < group.sample_size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    group.trees.push_back(grow_tree(x, std::span(all).first(group.sample_size), limit, rng));
  }
  return group;
}

double IsoGroup::mean_path_length(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.path_length(x);
  return sum / static_cast<double>(trees.size());
}

double IsoGroup::score(std::span<const double> x) const {
  const double c = average_path_length(static_cast<double>(sample_size));
  return std::exp2(-mean_path_length(x) / (c > 0.0 ? c : 1.0));
}

std::size_t IsolationForest::tree_count() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.trees.size();
  return n;
}

double IsolationForest::score(std::span<const double> x) const {
  require(!groups_.empty(), ErrorKind::state, "isolation forest: not fitted");
  double s = groups_.front().score(x);
  for (std::size_t g = 1; g < groups_.size(); ++g) s = 0.5 * s + 0.5 * groups_[g].score(x);
  return s;
}

std::vector<double> IsolationForest::score(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = score(std::span<const double>(x.data() + r * x.cols(), static_cast<std::size_t>(x.cols())));
  }
  return out;
}

void IsolationForest::encode(ByteWriter& out) const {
  out.put_le(groups_.size(), 4);
  for (const auto& g : groups_) {
    out.put_le(g.sample_size, 8);
    out.put_le(g.trained_rows, 8);
    out.put_le(g.trees.size(), 4);
    for (const auto& t : g.trees) {
      out.put_le(t.nodes.size(), 4);
      for (const auto& n : t.nodes) {
        out.put_le(static_cast<std::uint32_t>(n.feature), 4);
        out.put_f64_le(n.split);
        out.put_le(static_cast<std::uint32_t>(n.left), 4);
        out.put_le(static_cast<std::uint32_t>(n.right), 4);
        out.put_le(n.size, 8);
      }
    }
  }
}

IsolationForest IsolationForest::decode(ByteReader& in) {
  IsolationForest f;
  const auto groups = in.get_le(4);
  for (std::uint64_t g = 0; g < groups; ++g) {
    IsoGroup group;
    group.sample_size = in.get_le(8);
    group.trained_rows = in.get_le(8);
    const auto trees = in.get_le(4);
    for (std::uint64_t t = 0; t < trees; ++t) {
      IsoTree tree;
      const auto nodes = in.get_le(4);
      require(nodes >= 1 && nodes <= in.remaining(), ErrorKind::data, "isolation forest: corrupt node count");
      tree.nodes.resize(nodes);
      for (auto& n : tree.nodes) {
        n.feature = static_cast<std::int32_t>(static_cast<std::uint32_t>(in.get_le(4)));
        n.split = in.get_f64_le();
        n.left = static_cast<std::int32_t>(static_cast<std::uint32_t>(in.get_le(4)));
        n.right = static_cast<std::int32_t>(static_cast<std::uint32_t>(in.get_le(4)));
        n.size = in.get_le(8);
      }
      for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& n = tree.nodes[i];
        if (n.feature < 0) continue;
        // Children always follow their parent, which rules out cycles.
        const auto self = static_cast<std::int32_t>(i);
        require(n.left > self && n.right > self && static_cast<std::uint64_t>(n.left) < nodes &&
                    static_cast<std::uint64_t>(n.right) < nodes,
                ErrorKind::data, "isolation forest: corrupt child index");
      }
      group.trees.push_back(std::move(tree));
    }
    require(!group.trees.empty(), ErrorKind::data, "isolation forest: empty tree group");
    f.groups_.push_back(std::move(group));
  }
  return f;
}

}  // namespace ddoslab::extmodels
