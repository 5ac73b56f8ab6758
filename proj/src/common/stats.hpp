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

#include <span>
#include <vector>

namespace ddoslab {

// Linear interpolation between order statistics: position q*(n-1).
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> values);
double median(std::vector<double> values);

}  // namespace ddoslab
