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
#include <optional>
#include <string>

#include "melt/core/clock.hpp"
#include "melt/orchestrator/device_agent.hpp"

namespace melt::orchestrator {

enum class MonitorState { Idle, Armed, Recording, Stopped };

struct MonitorSession {
  std::string run_id;
  double sampling_frequency_hz = 0;
  MonitorState state = MonitorState::Idle;
  std::int64_t start_ns = 0;
  std::int64_t stop_ns = 0;
};

/// One recording session per device at a time.
class Monitor {
 public:
  Monitor(CaptureBackend& backend, Clock& clock) : backend_(backend), clock_(clock) {}

  /// MonitorBusy while a session is armed or recording.
  void arm(const std::string& run_id, double sampling_frequency_hz);
  /// Armed -> recording; returns the host start time.
  std::int64_t start();
  /// Recording -> stopped and fetches the capture. Calling again returns
  /// the same capture.
  const Capture& stop();

  const MonitorSession& session() const { return session_; }

 private:
  CaptureBackend& backend_;
  Clock& clock_;
  MonitorSession session_;
  std::optional<Capture> capture_;
};

/// Nominal monitor rate for a power source: 5 kHz monsoon, 100 Hz sysfs.
double default_sample_rate(core::PowerSource source);

}  // namespace melt::orchestrator
