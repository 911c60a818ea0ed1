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

#include "melt/orchestrator/monitor.hpp"

#include "melt/core/error.hpp"

namespace melt::orchestrator {

void Monitor::arm(const std::string& run_id, double hz) {
  if (session_.state == MonitorState::Armed || session_.state == MonitorState::Recording)
    throw Error(Errc::MonitorBusy, "monitor already holds session " + session_.run_id);
  if (!(hz > 0)) throw Error(Errc::InvalidArgument, "sampling frequency must be positive");
  session_ = MonitorSession{run_id, hz, MonitorState::Armed, 0, 0};
  capture_.reset();
}

std::int64_t Monitor::start() {
  if (session_.state != MonitorState::Armed) throw Error(Errc::InvalidArgument, "monitor is not armed");
  session_.start_ns = clock_.now_ns();
  session_.state = MonitorState::Recording;
  return session_.start_ns;
}

const Capture& Monitor::stop() {
  if (session_.state == MonitorState::Stopped && capture_) return *capture_;
  if (session_.state != MonitorState::Recording) throw Error(Errc::InvalidArgument, "monitor is not recording");
  session_.stop_ns = clock_.now_ns();
  session_.state = MonitorState::Stopped;
  capture_ = backend_.capture(session_.start_ns, session_.stop_ns, session_.sampling_frequency_hz);
  return *capture_;
}

double default_sample_rate(core::PowerSource source) {
  return source == core::PowerSource::Sysfs ? 100.0 : 5000.0;
}

}  // namespace melt::orchestrator
