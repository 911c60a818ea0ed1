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

/// Centered moving average over window_n points (window [i - (n-1)/2,
/// i + n/2]); windows shrink at the edges. Throws InvalidArgument for
/// window_n == 0.
std::vector<double> smooth(std::span<const double> series, std::size_t window_n);

}  // namespace melt::analysis
