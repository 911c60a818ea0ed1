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

#include "melt/orchestrator/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"
#include "melt/powertrace/csv.hpp"

namespace melt::orchestrator {

namespace fs = std::filesystem;
using core::json;

std::string_view to_string(Step s) {
  switch (s) {
    case Step::PowerOn: return "power_on";
    case Step::Sync: return "sync";
    case Step::Push: return "push";
    case Step::Apply: return "apply";
    case Step::Arm: return "arm";
    case Step::Run: return "run";
    case Step::StopMonitor: return "stop_monitor";
    case Step::Collect: return "collect";
    case Step::Sleep: return "sleep";
  }
  return "unknown";
}

void power_control(DeviceAgent& agent, PowerAction action, Clock& clock, double timeout_s) {
  if (!agent.supports_power_control()) return;
  agent.power(action);
  if (action == PowerAction::Off) return;
  const std::int64_t deadline = clock.now_ns() + seconds_to_ns(timeout_s);
  constexpr std::int64_t kPoll = 100'000'000;
  for (;;) {
    bool up = false;
    try {
      up = agent.responsive();
    } catch (const Error& e) {
      if (e.code() != Errc::AgentUnreachable && e.code() != Errc::Timeout) throw;
    }
    if (up) return;
    if (clock.now_ns() >= deadline) throw Error(Errc::PowerTimeout, "device not responsive after power on");
    clock.sleep_for_ns(std::min(kPoll, deadline - clock.now_ns()));
  }
}

std::string device_run_dir(const std::string& run_id) { return "runs/" + run_id; }

std::string device_model_path(const core::ModelDescriptor& model) { return "models/" + model.name + ".json"; }

std::string make_run_id(std::size_t spec_index, const core::ExperimentSpec& spec, int iteration) {
  std::string model = spec.model.name;
  for (auto& c : model)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '-';
  char buf[96];
  std::snprintf(buf, sizeof buf, "s%02zu_", spec_index);
  return buf + model + "_c" + std::to_string(spec.context_size) + "_g" + std::to_string(spec.max_gen_length) + "_b" +
         std::to_string(spec.batch_size) + "_i" + std::to_string(iteration);
}

std::size_t run_experiment(const core::ExperimentSpec& spec, const std::string& run_id, const ConversationSet& convs,
                           DeviceAgent& agent, Notifier& notifier, Clock& clock) {
  agent.launch({run_id, spec.backend, spec.model.name, device_run_dir(run_id)});
  notifier.start(run_id);
  std::size_t executed = 0;
  try {
    const bool micro = spec.mode == core::Mode::Micro;
    std::int64_t prompt_index = 0;
    for (std::size_t ci = 0; ci < convs.conversations.size(); ++ci) {
      const auto& conv = convs.conversations[ci];
      const std::int64_t deadline = clock.now_ns() + seconds_to_ns(spec.conversation_timeout_s);
      for (std::size_t pi = 0; pi < conv.size(); ++pi) {
        if (clock.now_ns() >= deadline) throw Error(Errc::Timeout, "conversation " + std::to_string(ci) + " timed out");
        PromptRequest req;
        req.run_id = run_id;
        req.conversation_index = static_cast<std::int64_t>(ci);
        req.prompt_index = prompt_index++;
        req.prompt_tokens = micro ? core::kMicroTokens : conv[pi].prompt_tokens;
        req.gen_tokens = micro ? std::optional<std::int64_t>(core::kMicroTokens) : conv[pi].gen_tokens;
        req.max_gen_length = spec.max_gen_length;
        req.context_size = spec.context_size;
        req.micro = micro;
        req.first_in_conversation = pi == 0;
        req.last_in_conversation = pi + 1 == conv.size();
        req.deadline_ns = deadline;
        agent.prompt(req);
        ++executed;
        if (clock.now_ns() > deadline) throw Error(Errc::Timeout, "conversation " + std::to_string(ci) + " timed out");
      }
    }
  } catch (...) {
    try {
      notifier.stop(run_id);
    } catch (const Error&) {
    }
    throw;
  }
  notifier.stop(run_id);
  return executed;
}

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

std::string events_from(const FileMap& files) {
  std::vector<const std::pair<const std::string, std::string>*> logs;
  for (const auto& kv : files)
    if (kv.first.size() > 6 && kv.first.ends_with(".jsonl")) logs.push_back(&kv);
  auto rank = [](const std::string& p) { return p.ends_with("/load.jsonl") ? 0 : 1; };
  std::sort(logs.begin(), logs.end(), [&](auto* a, auto* b) {
    return std::pair(rank(a->first), a->first) < std::pair(rank(b->first), b->first);
  });
  std::string out;
  for (auto* kv : logs) out += kv->second;
  return out;
}

}  // namespace

void write_run_dir(const fs::path& dir, core::RunManifest& manifest, const RunArtifacts& artifacts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  manifest.artifact_paths.clear();

  write_file(dir / "events.jsonl", events_from(artifacts.files));
  manifest.artifact_paths[std::string(core::kArtifactEvents)] = "events.jsonl";

  if (!artifacts.capture.power.empty()) {
    const auto& p = artifacts.capture.power;
    write_file(dir / "power.csv", p.is_electrical() ? powertrace::serialize_monsoon(p) : powertrace::serialize_sysfs(p));
    manifest.artifact_paths[std::string(core::kArtifactPower)] = "power.csv";
  }
  if (artifacts.capture.temperature && !artifacts.capture.temperature->empty()) {
    write_file(dir / "temperature.csv", powertrace::serialize_temperature(*artifacts.capture.temperature));
    manifest.artifact_paths[std::string(core::kArtifactTemperature)] = "temperature.csv";
  }
  for (const auto& [path, bytes] : artifacts.files) {
    if (path.ends_with("/responses.json")) {
      write_file(dir / "responses.json", bytes);
      manifest.artifact_paths[std::string(core::kArtifactResponses)] = "responses.json";
    }
  }
  write_file(dir / "manifest.json", json(manifest).dump(2) + "\n");
}

namespace {

struct QueueAbort {
  std::string reason;
};

class QueueRunner {
 public:
  QueueRunner(const JobQueue& q, DeviceAgent& a, CaptureBackend& b, NotificationLog& marks, Notifier& n, Clock& c,
              const RunnerConfig& cfg)
      : queue_(q), agent_(a), monitor_(b, c), marks_(marks), notifier_(n), clock_(c), cfg_(cfg) {}

  QueueResult run() {
    if (queue_.specs.empty()) return std::move(result_);
    try {
      try {
        power_control(agent_, PowerAction::On, clock_, cfg_.power_timeout_s);
        log(Step::PowerOn, 0, 0, "", "");
        sync_ = sync_clocks(agent_, clock_, cfg_.sync);
        log(Step::Sync, 0, 0, "", "offset_ns=" + std::to_string(sync_.offset_ns) + " rtt_ns=" + std::to_string(sync_.rtt_ns));
      } catch (const Error& e) {
        throw QueueAbort{e.what()};
      }
      for (std::size_t i = 0; i < queue_.specs.size(); ++i) run_spec(i);
    } catch (const QueueAbort& abort) {
      result_.aborted = true;
      result_.abort_reason = abort.reason;
    }
    return std::move(result_);
  }

 private:
  void log(Step s, std::size_t spec, int it, const std::string& run_id, std::string detail) {
    result_.log.push_back({s, spec, it, run_id, clock_.now_ns(), std::move(detail)});
  }

  // AgentUnreachable anywhere means the device is gone.
  template <class F>
  auto guarded(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == Errc::AgentUnreachable) throw QueueAbort{e.what()};
      throw;
    }
  }

  const ConversationSet& conversations(const core::ExperimentSpec& spec) {
    auto it = queue_.conversations.find(spec.conversations_uri);
    if (it == queue_.conversations.end())
      throw QueueAbort{"queue has no conversations for " + spec.conversations_uri};
    return it->second;
  }

  void run_spec(std::size_t index) {
    const auto& spec = queue_.specs[index];
    const auto& convs = conversations(spec);
    guarded([&] {
      agent_.push(device_model_path(spec.model), json(spec.model).dump());
      agent_.push(std::string(kDeviceConversations), json(convs).dump());
    });
    log(Step::Push, index, 0, "", spec.model.name);
    guarded([&] { agent_.push(std::string(kDeviceExperimentConf), json(spec).dump()); });
    log(Step::Apply, index, 0, "", "");
    for (int it = 1; it <= spec.iterations; ++it) run_iteration(index, spec, convs, it);
  }

  void run_iteration(std::size_t index, const core::ExperimentSpec& spec, const ConversationSet& convs, int it) {
    core::RunManifest m;
    m.run_id = make_run_id(index, spec, it);
    m.spec = spec;
    m.iteration = it;
    m.clock_sync = sync_;
    m.idle_lead_s = cfg_.idle_lead_s.value_or(spec.sleep_between_s);
    const double rate = cfg_.sample_rate_hz.value_or(default_sample_rate(spec.device.power_source));

    monitor_.arm(m.run_id, rate);
    m.host_start_ns = monitor_.start();
    clock_.sleep_for_ns(seconds_to_ns(m.idle_lead_s));
    log(Step::Arm, index, it, m.run_id, "");

    std::optional<QueueAbort> abort;
    try {
      const auto n = run_experiment(spec, m.run_id, convs, agent_, notifier_, clock_);
      m.message = std::to_string(n) + " prompts";
    } catch (const Error& e) {
      m.message = e.what();
      switch (e.code()) {
        case Errc::AgentOom: m.status = core::RunStatus::Oom; break;
        case Errc::Timeout: m.status = core::RunStatus::Timeout; break;
        default: m.status = core::RunStatus::DeviceError; break;
      }
      if (e.code() == Errc::AgentUnreachable) abort = QueueAbort{e.what()};
      else if (e.code() != Errc::AgentOom) {
        try {
          agent_.interrupt();
        } catch (const Error& ie) {
          if (ie.code() == Errc::AgentUnreachable) abort = QueueAbort{ie.what()};
        }
      }
    }
    if (auto w = marks_.window(m.run_id)) {
      m.mark_start_ns = w->start_ns;
      m.mark_stop_ns = w->stop_ns;
    }

    RunArtifacts art;
    if (abort) {
      try {
        art.capture = monitor_.stop();
      } catch (const Error&) {
      }
      m.host_end_ns = monitor_.session().stop_ns;
      finish(std::move(m), std::move(art));
      throw *abort;
    }
    log(Step::Run, index, it, m.run_id, std::string(core::to_string(m.status)));

    art.capture = guarded([&] { return monitor_.stop(); });
    m.host_end_ns = monitor_.session().stop_ns;
    log(Step::StopMonitor, index, it, m.run_id, "");

    art.files = guarded([&] { return agent_.collect(device_run_dir(m.run_id)); });
    log(Step::Collect, index, it, m.run_id, std::to_string(art.files.size()) + " files");
    finish(std::move(m), std::move(art));

    clock_.sleep_for_ns(seconds_to_ns(spec.sleep_between_s));
    log(Step::Sleep, index, it, result_.manifests.back().run_id, "");
  }

  void finish(core::RunManifest m, RunArtifacts art) {
    if (!cfg_.out_dir.empty()) write_run_dir(cfg_.out_dir / m.run_id, m, art);
    result_.manifests.push_back(std::move(m));
    result_.artifacts.push_back(std::move(art));
  }

  const JobQueue& queue_;
  DeviceAgent& agent_;
  Monitor monitor_;
  NotificationLog& marks_;
  Notifier& notifier_;
  Clock& clock_;
  const RunnerConfig& cfg_;
  core::ClockSync sync_;
  QueueResult result_;
};

}  // namespace

QueueResult run_queue(const JobQueue& queue, DeviceAgent& agent, CaptureBackend& monitor_backend,
                      NotificationLog& marks, Notifier& notifier, Clock& clock, const RunnerConfig& config) {
  return QueueRunner(queue, agent, monitor_backend, marks, notifier, clock, config).run();
}

}  // namespace melt::orchestrator
