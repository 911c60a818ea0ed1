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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "melt/agent/event.hpp"
#include "melt/core/types.hpp"
#include "melt/powertrace/trace.hpp"

namespace melt::analysis {

/// Events moved into the host timebase next to the traces they explain.
/// Trace seconds are measured from manifest.host_start_ns.
struct AlignedTimeline {
  std::vector<agent::Event> events;  // host ns
  powertrace::PowerTrace power;
  std::optional<powertrace::TempTrace> temperature;
  core::RunManifest manifest;
  std::int64_t offset_ns = 0;
  bool partial = false;

  double trace_seconds(std::int64_t host_ns) const;
};

/// Tolerance around the power trace span before a run counts as partial.
inline constexpr double kAlignSlackS = 1.0;

/// host_ts = device_ts - offset_ns, order preserved.
std::vector<agent::Event> to_host_timebase(std::vector<agent::Event> events, const core::ClockSync& sync);

AlignedTimeline align(std::vector<agent::Event> device_events, powertrace::PowerTrace power,
                      std::optional<powertrace::TempTrace> temperature, core::RunManifest manifest);

/// Reads a run directory (manifest.json plus the artifacts it names).
/// Throws IoError for missing files and the parser errors for bad ones.
AlignedTimeline load_run(const std::filesystem::path& dir);

/// Parses either power CSV layout, chosen by its header line.
powertrace::PowerTrace parse_power_csv(std::string_view bytes);

}  // namespace melt::analysis
