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
#include <string>
#include <thread>

#include "melt/orchestrator/device_agent.hpp"

namespace melt::agent {

/// Serves a DeviceAgent (and its power monitor) over the agent wire
/// protocol. httplib handles requests on worker threads; the wrapped agent
/// is expected to serialize them. Port 0 binds an ephemeral port.
class AgentServer {
 public:
  AgentServer(orchestrator::DeviceAgent& agent, orchestrator::CaptureBackend& monitor,
              const std::string& host = "127.0.0.1", int port = 0);
  ~AgentServer();
  AgentServer(const AgentServer&) = delete;
  AgentServer& operator=(const AgentServer&) = delete;

  int port() const { return port_; }
  /// Runs the accept loop on a background thread.
  void start();
  /// Blocks in the accept loop until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace melt::agent
