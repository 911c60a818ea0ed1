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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "melt/agent/event.hpp"
#include "melt/agent/profile.hpp"
#include "melt/agent/simulator.hpp"
#include "melt/core/clock.hpp"
#include "melt/orchestrator/device_agent.hpp"

namespace melt::agent {

/// In-process simulated device: a benchmark app driven by SimProfile, an
/// in-memory filesystem, and the attached power monitor. Time passes by
/// sleeping on the supplied clock, so a VirtualClock makes runs instant.
/// Requests are serialized.
///
/// Faults: oom -> AgentOom, crash -> AgentCrash, stall -> sleeps to the
/// prompt deadline then Timeout, disconnect -> AgentUnreachable from then on.
class SimAgent final : public orchestrator::DeviceAgent, public orchestrator::CaptureBackend {
 public:
  SimAgent(SimProfile profile, core::DeviceDescriptor device, Clock& clock);

  core::DeviceDescriptor device() override;
  bool supports_power_control() override;
  void power(orchestrator::PowerAction action) override;
  bool responsive() override;
  std::int64_t clock_probe(std::int64_t host_ts_ns) override;
  void push(const std::string& path, const std::string& data) override;
  void launch(const orchestrator::LaunchRequest& request) override;
  void interrupt() override;
  orchestrator::PromptResult prompt(const orchestrator::PromptRequest& request) override;
  orchestrator::FileMap collect(const std::string& prefix) override;

  orchestrator::Capture capture(std::int64_t t0_host_ns, std::int64_t t1_host_ns, double rate_hz) override;

  /// Every event the device emitted, device timebase.
  std::vector<Event> device_events() const;
  const SimProfile& profile() const { return profile_; }
  int launches() const;

 private:
  struct ActiveRun {
    std::string run_id;
    std::string output_dir;
    SimState state;
    nlohmann::json responses = nlohmann::json::array();
  };

  void require_up() const;
  std::int64_t device_now() const;
  // Sleeps the host clock until the device reaches device_ts.
  void advance_to(std::int64_t device_ts);
  [[noreturn]] void raise_fault(FaultKind kind, std::int64_t deadline_ns);
  std::int64_t draw_gen_tokens(const orchestrator::PromptRequest& r);

  SimProfile profile_;
  core::DeviceDescriptor device_;
  Clock& clock_;
  mutable std::mutex mu_;
  bool powered_ = true;
  std::int64_t ready_at_ns_ = 0;
  bool disconnected_ = false;
  int launches_ = 0;
  std::optional<ActiveRun> run_;
  orchestrator::FileMap fs_;
  std::vector<Event> events_;
  std::uint64_t captures_ = 0;
  GaussianNoise link_noise_;
  GaussianNoise length_noise_;
};

/// Default simulated device identity for a profile.
core::DeviceDescriptor default_sim_device();

}  // namespace melt::agent
