/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace melt::analysis {

struct DegradationReport {
  std::vector<double> series;
  std::vector<std::size_t> changepoints;
  std::size_t window_w = 0;
  double drop_threshold = 0;

  bool operator==(const DegradationReport&) const = default;
};

inline constexpr std::size_t kDefaultDegradationWindow = 5;
inline constexpr double kDefaultDropFraction = 0.06;

/// Index i (w <= i <= n - w) is a changepoint when the mean of
/// series[i, i + w) falls below (1 - drop_frac) times the mean of
/// series[i - w, i). Consecutive detections collapse to the first index.
/// Throws SeriesTooShort when n < 2w + 1, InvalidArgument for w == 0 or
/// drop_frac outside (0, 1).
DegradationReport detect_degradation(std::span<const double> series, std::size_t w = kDefaultDegradationWindow,
                                     double drop_frac = kDefaultDropFraction);

}  // namespace melt::analysis
