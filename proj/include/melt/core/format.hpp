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

#include <optional>
#include <string>
#include <string_view>

namespace melt::core {

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double v);
/// printf %.6g, with -0 normalized to 0.
std::string format_sig6(double v);
/// Fixed-point with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

/// Whole-string parse, nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

}  // namespace melt::core
