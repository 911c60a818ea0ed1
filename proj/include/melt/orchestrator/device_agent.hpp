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
#include <map>
#include <optional>
#include <string>

#include "melt/core/types.hpp"
#include "melt/powertrace/trace.hpp"

namespace melt::orchestrator {

enum class PowerAction { On, Off };

/// path -> bytes
using FileMap = std::map<std::string, std::string>;

struct LaunchRequest {
  std::string run_id;
  core::Backend backend = core::Backend::Sim;
  std::string model;
  // Device-side directory the app writes its per-prompt reports into.
  std::string output_dir;
};

struct PromptRequest {
  std::string run_id;
  std::int64_t conversation_index = 0;
  std::int64_t prompt_index = 0;  // 0-based across the run
  std::int64_t prompt_tokens = 0;
  // Absent in macro mode: the app stops at its own end-of-sequence.
  std::optional<std::int64_t> gen_tokens;
  std::int64_t max_gen_length = 0;
  std::int64_t context_size = 0;
  bool micro = false;
  bool first_in_conversation = false;
  bool last_in_conversation = false;
  std::int64_t deadline_ns = 0;  // host timebase
};

struct PromptResult {
  std::int64_t generated_tokens = 0;
};

/// Capability set of a device under test. Transports (in-process
/// simulator, HTTP) implement it; everything throws melt::Error.
/// prompt() raises Timeout, AgentOom or AgentCrash for per-run failures and
/// AgentUnreachable when the device is gone.
class DeviceAgent {
 public:
  virtual ~DeviceAgent() = default;

  virtual core::DeviceDescriptor device() = 0;
  /// Edge boards are always on.
  virtual bool supports_power_control() = 0;
  virtual void power(PowerAction action) = 0;
  virtual bool responsive() = 0;
  /// Device clock reading (ns) taken while serving the probe.
  virtual std::int64_t clock_probe(std::int64_t host_ts_ns) = 0;
  virtual void push(const std::string& path, const std::string& data) = 0;
  virtual void launch(const LaunchRequest& request) = 0;
  virtual void interrupt() = 0;
  virtual PromptResult prompt(const PromptRequest& request) = 0;
  virtual FileMap collect(const std::string& prefix) = 0;
};

struct Capture {
  powertrace::PowerTrace power;
  std::optional<powertrace::TempTrace> temperature;
};

/// The power monitor attached to a device. Sample timestamps are seconds
/// relative to t0.
class CaptureBackend {
 public:
  virtual ~CaptureBackend() = default;
  virtual Capture capture(std::int64_t t0_host_ns, std::int64_t t1_host_ns, double rate_hz) = 0;
};

}  // namespace melt::orchestrator
