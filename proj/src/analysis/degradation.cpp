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

#include "melt/analysis/degradation.hpp"

#include <numeric>

#include "melt/core/error.hpp"

namespace melt::analysis {

DegradationReport detect_degradation(std::span<const double> series, std::size_t w, double drop_frac) {
  if (w == 0) throw Error(Errc::InvalidArgument, "window must be at least 1");
  if (!(drop_frac > 0 && drop_frac < 1)) throw Error(Errc::InvalidArgument, "drop fraction must lie in (0, 1)");
  const std::size_t n = series.size();
  if (n < 2 * w + 1)
    throw Error(Errc::SeriesTooShort, "need at least " + std::to_string(2 * w + 1) + " points, got " + std::to_string(n));

  DegradationReport r{{series.begin(), series.end()}, {}, w, drop_frac};
  auto mean = [&](std::size_t from) {
    return std::accumulate(series.begin() + static_cast<std::ptrdiff_t>(from),
                           series.begin() + static_cast<std::ptrdiff_t>(from + w), 0.0) /
           static_cast<double>(w);
  };
  bool in_run = false;
  for (std::size_t i = w; i + w <= n; ++i) {
    const bool hit = mean(i) < (1 - drop_frac) * mean(i - w);
    if (hit && !in_run) r.changepoints.push_back(i);
    in_run = hit;
  }
  return r;
}

}  // namespace melt::analysis
