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

#include "melt/orchestrator/clock_sync.hpp"

#include <optional>

#include "melt/core/error.hpp"

namespace melt::orchestrator {

core::ClockSync sync_clocks(DeviceAgent& agent, Clock& clock, const SyncOptions& options) {
  if (options.probes < 5) throw Error(Errc::InvalidArgument, "clock sync needs at least 5 probes");
  std::optional<core::ClockSync> best;
  std::string last_failure = "no probe answered";
  for (int i = 0; i < options.probes; ++i) {
    const std::int64_t send = clock.now_ns();
    std::int64_t device_ts = 0;
    try {
      device_ts = agent.clock_probe(send);
    } catch (const Error& e) {
      if (e.code() != Errc::AgentUnreachable && e.code() != Errc::Timeout) throw;
      last_failure = e.what();
      continue;
    }
    const std::int64_t recv = clock.now_ns();
    const std::int64_t rtt = recv - send;
    if (rtt < 0) throw Error(Errc::ClockUnstable, "host clock went backwards during a probe");
    if (!best || rtt < best->rtt_ns) best = core::ClockSync{device_ts - send - rtt / 2, rtt, send};
  }
  if (!best) throw Error(Errc::AgentUnreachable, last_failure);
  if (best->rtt_ns > options.max_rtt_ns)
    throw Error(Errc::ClockUnstable, "minimum probe rtt " + std::to_string(best->rtt_ns) + " ns exceeds bound");
  return *best;
}

}  // namespace melt::orchestrator
