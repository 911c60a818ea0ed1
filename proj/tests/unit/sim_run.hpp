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

#include <algorithm>
#include <stdexcept>

#include "melt/agent/sim_agent.hpp"
#include "melt/analysis/align.hpp"
#include "melt/orchestrator/runner.hpp"

namespace melt::test {

// One macro-mode run of a single spec against the in-process simulator.
struct SimRun {
  core::RunManifest manifest;
  orchestrator::RunArtifacts artifacts;
  agent::SimProfile profile;
};

inline SimRun simulate(agent::SimProfile p, const orchestrator::ConversationSet& convs, double rate_hz = 5000,
                core::Mode mode = core::Mode::Macro) {
  VirtualClock clock;
  agent::SimAgent a(p, agent::default_sim_device(), clock);
  orchestrator::NotificationLog marks(clock);
  orchestrator::LocalNotifier n(marks);
  orchestrator::JobQueue q;
  q.device = agent::default_sim_device();
  core::ExperimentSpec s;
  s.model.name = "m";
  s.model.family = "f";
  s.model.param_count = 1;
  s.model.bitwidth = 4;
  s.device = q.device;
  s.mode = mode;
  s.context_size = 2048;
  s.max_gen_length = 512;
  s.conversations_uri = "c";
  s.iterations = 1;
  s.sleep_between_s = 5;
  q.specs = {s};
  q.conversations["c"] = convs;
  orchestrator::RunnerConfig cfg;
  cfg.sample_rate_hz = rate_hz;
  auto r = orchestrator::run_queue(q, a, a, marks, n, clock, cfg);
  if (r.manifests.size() != 1) throw std::runtime_error("expected one run");
  return {r.manifests[0], r.artifacts[0], p};
}

inline analysis::AlignedTimeline timeline_of(const SimRun& r) {
  std::vector<agent::Event> events;
  for (const auto& [path, bytes] : r.artifacts.files)
    if (path.ends_with(".jsonl")) {
      auto e = agent::read_jsonl(bytes);
      events.insert(events.end(), e.begin(), e.end());
    }
  std::stable_sort(events.begin(), events.end(), [](const agent::Event& a, const agent::Event& b) { return a.ts_ns < b.ts_ns; });
  return analysis::align(std::move(events), r.artifacts.capture.power, r.artifacts.capture.temperature, r.manifest);
}

inline agent::SimProfile noise_free() {
  agent::SimProfile p;
  p.noise_std_mw = 0;
  return p;
}

}  // namespace melt::test
