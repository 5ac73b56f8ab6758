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
#include "netcore/losses.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace ddoslab::netcore {
namespace {

void check_same(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::shape, "loss: prediction/target shape mismatch");
  require(a.size() > 0, ErrorKind::shape, "loss: empty batch");
}

}  // namespace

LossValue mean_squared(const Matrix& pred, const Matrix& target) {
  check_same(pred, target);
  const double n = static_cast<double>(pred.size());
  Matrix diff = pred - target;
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

LossValue mean_absolute(const Matrix& pred, const Matrix& target) {
  check_same(pred, target);
  const double n = static_cast<double>(pred.size());
  Matrix diff = pred - target;
  Matrix sign = diff.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  return {diff.cwiseAbs().sum() / n, sign / n};
}

LossValue binary_cross_entropy(const Matrix& prob, const Matrix& target) {
  check_same(prob, target);
  const double n = static_cast<double>(prob.rows());
  constexpr double kEps = 1e-12;
  double total = 0.0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    const double p = std::clamp(prob.data()[i], kEps, 1.0 - kEps);
    const double t = target.data()[i];
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return {total / n, (prob - target) / n};
}

}  // namespace ddoslab::netcore
