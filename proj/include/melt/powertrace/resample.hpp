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

#include "melt/powertrace/trace.hpp"

namespace melt::powertrace {

/// Linear interpolation onto a uniform grid spanning [t_first, t_last] with
/// round(span * target_hz) intervals, so both endpoints are kept exactly.
/// Electrical traces interpolate current and voltage; rail traces resample
/// every rail over its own span. Throws InvalidArgument for target_hz <= 0
/// and EmptyTrace for an empty trace.
PowerTrace resample(const PowerTrace& trace, double target_hz);

}  // namespace melt::powertrace
