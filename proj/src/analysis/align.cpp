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

#include "melt/analysis/align.hpp"

#include <fstream>
#include <sstream>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"
#include "melt/powertrace/csv.hpp"

namespace melt::analysis {

namespace fs = std::filesystem;

double AlignedTimeline::trace_seconds(std::int64_t host_ns) const {
  return static_cast<double>(host_ns - manifest.host_start_ns) * 1e-9;
}

std::vector<agent::Event> to_host_timebase(std::vector<agent::Event> events, const core::ClockSync& sync) {
  for (auto& e : events) e.ts_ns -= sync.offset_ns;
  return events;
}

AlignedTimeline align(std::vector<agent::Event> device_events, powertrace::PowerTrace power,
                      std::optional<powertrace::TempTrace> temperature, core::RunManifest manifest) {
  AlignedTimeline tl;
  tl.offset_ns = manifest.clock_sync.offset_ns;
  tl.events = to_host_timebase(std::move(device_events), manifest.clock_sync);
  tl.power = std::move(power);
  tl.temperature = std::move(temperature);
  tl.manifest = std::move(manifest);
  if (tl.power.empty()) {
    tl.partial = !tl.events.empty();
    return tl;
  }
  const double lo = tl.power.t_first() - kAlignSlackS;
  const double hi = tl.power.t_last() + kAlignSlackS;
  for (const auto& e : tl.events) {
    const double t = tl.trace_seconds(e.ts_ns);
    if (t < lo || t > hi) {
      tl.partial = true;
      break;
    }
  }
  return tl;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

powertrace::PowerTrace parse_power_csv(std::string_view bytes) {
  const auto eol = bytes.find('\n');
  auto header = bytes.substr(0, eol);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header == powertrace::kSysfsHeader) return powertrace::parse_sysfs(bytes);
  return powertrace::parse_monsoon(bytes);
}

AlignedTimeline load_run(const fs::path& dir) {
  core::RunManifest manifest;
  try {
    manifest = core::json::parse(read_file(dir / "manifest.json")).get<core::RunManifest>();
  } catch (const core::json::exception& e) {
    throw Error(Errc::MalformedConfig, (dir / "manifest.json").string() + ": " + e.what());
  }
  auto artifact = [&](std::string_view key) -> std::optional<fs::path> {
    auto it = manifest.artifact_paths.find(std::string(key));
    if (it == manifest.artifact_paths.end()) return std::nullopt;
    return dir / it->second;
  };
  std::vector<agent::Event> events;
  if (auto p = artifact(core::kArtifactEvents)) events = agent::read_jsonl(read_file(*p));
  powertrace::PowerTrace power;
  if (auto p = artifact(core::kArtifactPower)) power = parse_power_csv(read_file(*p));
  std::optional<powertrace::TempTrace> temp;
  if (auto p = artifact(core::kArtifactTemperature)) temp = powertrace::parse_temperature(read_file(*p));
  return align(std::move(events), std::move(power), std::move(temp), std::move(manifest));
}

}  // namespace melt::analysis
