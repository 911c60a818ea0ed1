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

#include <vector>

#include "melt/core/types.hpp"

namespace melt::core {

/// Pairs contexts with max generation lengths elementwise and crosses the
/// pairs with batch sizes. Pair index is the major order, batch index minor.
/// Throws LengthMismatch when the pairing lists differ in length and
/// InvalidArgument on non-positive entries.
std::vector<GridPoint> expand_grid(const GridSpec& grid);

}  // namespace melt::core
