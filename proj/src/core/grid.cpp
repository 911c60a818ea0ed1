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

#include "melt/core/grid.hpp"

#include <algorithm>
#include <string>

#include "melt/core/error.hpp"

namespace melt::core {

std::vector<GridPoint> expand_grid(const GridSpec& grid) {
  if (grid.contexts.size() != grid.max_gen_lengths.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(grid.contexts.size()) + " contexts vs " +
                                          std::to_string(grid.max_gen_lengths.size()) + " max_gen_lengths");
  }
  auto positive = [](const std::vector<std::int64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x > 0; });
  };
  if (!positive(grid.contexts) || !positive(grid.max_gen_lengths) || !positive(grid.batch_sizes))
    throw Error(Errc::InvalidArgument, "grid entries must be positive");

  std::vector<GridPoint> points;
  points.reserve(grid.contexts.size() * grid.batch_sizes.size());
  for (std::size_t i = 0; i < grid.contexts.size(); ++i)
    for (auto batch : grid.batch_sizes) points.push_back({grid.contexts[i], grid.max_gen_lengths[i], batch});
  return points;
}

}  // namespace melt::core
