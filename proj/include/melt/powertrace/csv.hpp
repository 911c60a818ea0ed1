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

#include <string>
#include <string_view>

#include "melt/powertrace/trace.hpp"

namespace melt::powertrace {

inline constexpr std::string_view kMonsoonHeader = "ts_s,current_mA,voltage_V";
inline constexpr std::string_view kSysfsHeader = "ts_s,rail,power_mW";
inline constexpr std::string_view kTemperatureHeader = "ts_s,sensor,temp_C";

// Parsers report MalformedRow / NonMonotonicTimestamp with the 1-based line
// number (the header is line 1) and EmptyTrace when no data rows exist.
PowerTrace parse_monsoon(std::string_view bytes);
PowerTrace parse_sysfs(std::string_view bytes);
TempTrace parse_temperature(std::string_view bytes);

// Serializers write shortest round-trip decimals so that
// parse(serialize(parse(x))) == parse(x). Synthesized rails are omitted.
std::string serialize_monsoon(const PowerTrace& trace);
std::string serialize_sysfs(const PowerTrace& trace);
std::string serialize_temperature(const TempTrace& trace);

}  // namespace melt::powertrace
