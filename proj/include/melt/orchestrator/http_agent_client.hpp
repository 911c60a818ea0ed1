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

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "melt/core/clock.hpp"
#include "melt/orchestrator/device_agent.hpp"

namespace melt::orchestrator {

/// DeviceAgent and CaptureBackend over the agent wire protocol. Connection
/// failures surface as AgentUnreachable; prompt reads wait until the
/// request deadline plus a grace period.
class HttpAgentClient final : public DeviceAgent, public CaptureBackend {
 public:
  /// url: http://host:port
  HttpAgentClient(const std::string& url, Clock& clock);
  ~HttpAgentClient() override;

  core::DeviceDescriptor device() override;
  bool supports_power_control() override;
  void power(PowerAction action) override;
  bool responsive() override;
  std::int64_t clock_probe(std::int64_t host_ts_ns) override;
  void push(const std::string& path, const std::string& data) override;
  void launch(const LaunchRequest& request) override;
  void interrupt() override;
  PromptResult prompt(const PromptRequest& request) override;
  FileMap collect(const std::string& prefix) override;

  Capture capture(std::int64_t t0_host_ns, std::int64_t t1_host_ns, double rate_hz) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace melt::orchestrator
