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
#include <string_view>
#include <vector>

#include "melt/core/clock.hpp"
#include "melt/core/types.hpp"
#include "melt/orchestrator/clock_sync.hpp"
#include "melt/orchestrator/device_agent.hpp"
#include "melt/orchestrator/monitor.hpp"
#include "melt/orchestrator/notification.hpp"
#include "melt/orchestrator/queue_file.hpp"

namespace melt::orchestrator {

enum class Step { PowerOn, Sync, Push, Apply, Arm, Run, StopMonitor, Collect, Sleep };
std::string_view to_string(Step s);

struct StatusEntry {
  Step step;
  std::size_t spec_index = 0;
  int iteration = 0;       // 0 for queue- and spec-level steps
  std::string run_id;      // empty for queue- and spec-level steps
  std::int64_t host_ns = 0;
  std::string detail;
};

struct RunnerConfig {
  std::filesystem::path out_dir;  // empty: keep artifacts in memory only
  std::optional<double> sample_rate_hz;  // default per power source
  // Idle capture at the head of every run; defaults to sleep_between_s.
  std::optional<double> idle_lead_s;
  SyncOptions sync;
  double power_timeout_s = 60;
};

struct RunArtifacts {
  FileMap files;  // collected device files
  Capture capture;
};

struct QueueResult {
  std::vector<core::RunManifest> manifests;
  std::vector<RunArtifacts> artifacts;  // parallel to manifests
  std::vector<StatusEntry> log;
  bool aborted = false;
  std::string abort_reason;
};

/// Brings the device up and blocks until responsive(). No-op for agents
/// without power control. Throws PowerTimeout.
void power_control(DeviceAgent& agent, PowerAction action, Clock& clock, double timeout_s = 60);

/// Device-side locations used by the runner and simulator.
std::string device_run_dir(const std::string& run_id);
inline constexpr std::string_view kDeviceExperimentConf = "conf/experiment.json";
inline constexpr std::string_view kDeviceConversations = "conf/conversations.json";
std::string device_model_path(const core::ModelDescriptor& model);

/// Opens the app, posts start, runs every conversation in order and posts
/// stop. Each conversation gets conversation_timeout_s from its first prompt.
/// Micro mode forces kMicroTokens prefill and generation. Returns the
/// number of prompts executed. Throws Timeout, AgentOom, AgentCrash,
/// AgentUnreachable.
std::size_t run_experiment(const core::ExperimentSpec& spec, const std::string& run_id, const ConversationSet& convs,
                           DeviceAgent& agent, Notifier& notifier, Clock& clock);

/// Stable run identifier: s<spec>_<model>_c<ctx>_g<gen>_b<batch>_i<iteration>.
std::string make_run_id(std::size_t spec_index, const core::ExperimentSpec& spec, int iteration);

/// Executes the queue serially: power on, sync, then per spec push and
/// apply, then per iteration arm, run, stop monitor, collect, sleep. Per-run
/// failures land in the manifest status; losing the agent aborts the queue
/// and returns what completed. With out_dir set each run is written to
/// out_dir/<run_id>/.
QueueResult run_queue(const JobQueue& queue, DeviceAgent& agent, CaptureBackend& monitor_backend,
                      NotificationLog& marks, Notifier& notifier, Clock& clock, const RunnerConfig& config);

/// Writes manifest.json, events.jsonl, power.csv, temperature.csv and
/// responses.json into dir and fills manifest.artifact_paths.
void write_run_dir(const std::filesystem::path& dir, core::RunManifest& manifest, const RunArtifacts& artifacts);

}  // namespace melt::orchestrator
