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

#include "melt/powertrace/trace.hpp"

namespace melt::powertrace {

struct BaselinePower {
  double mean_power_mw = 0;
  double t0 = 0;
  double t1 = 0;
  std::size_t sample_count = 0;
  bool operator==(const BaselinePower&) const = default;
};

inline constexpr std::size_t kMinBaselineSamples = 10;

/// Time-weighted (trapezoidal) mean of the primary power channel over the
/// window clipped to the trace span. Throws WindowOutOfRange when the
/// window misses the trace and TooFewSamples with fewer than 10 samples
/// inside it.
BaselinePower estimate_baseline(const PowerTrace& trace, double t0, double t1);

/// Net trace with the baseline removed from every primary sample. For
/// electrical traces the current drops by baseline / measured voltage.
/// Negative samples are kept.
PowerTrace subtract_baseline(const PowerTrace& trace, const BaselinePower& baseline);

}  // namespace melt::powertrace
