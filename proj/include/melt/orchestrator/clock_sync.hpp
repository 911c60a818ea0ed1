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

#include "melt/core/clock.hpp"
#include "melt/core/types.hpp"
#include "melt/orchestrator/device_agent.hpp"

namespace melt::orchestrator {

struct SyncOptions {
  int probes = 8;
  std::int64_t max_rtt_ns = 50'000'000;
};

/// Min-RTT estimator: per probe offset = device_ts - (send + recv) / 2,
/// keep the probe with the smallest round trip. Failed probes are skipped;
/// AgentUnreachable if none succeeds, ClockUnstable if the best rtt exceeds
/// max_rtt_ns, InvalidArgument for fewer than 5 probes.
core::ClockSync sync_clocks(DeviceAgent& agent, Clock& clock, const SyncOptions& options = {});

}  // namespace melt::orchestrator
