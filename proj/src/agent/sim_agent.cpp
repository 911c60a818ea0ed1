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

#include "melt/agent/sim_agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "melt/core/error.hpp"

namespace melt::agent {

namespace orch = orchestrator;

namespace {

// Edge rail split used when the device reports sysfs power.
struct RailShare {
  const char* name;
  double share;
};
constexpr RailShare kEdgeRails[] = {{"CPU", 0.35}, {"GPU", 0.5}, {"DDR", 0.15}};

powertrace::PowerTrace as_rails(const powertrace::PowerTrace& electrical) {
  std::vector<powertrace::RailSeries> rails;
  for (const auto& r : kEdgeRails) {
    powertrace::RailSeries s{r.name, powertrace::classify_rail(r.name), {}, {}, false};
    for (std::size_t i = 0; i < electrical.size(); ++i) {
      s.ts_s.push_back(electrical.times()[i]);
      s.power_mw.push_back(std::max(0.0, electrical.power_mw(i) * r.share));
    }
    rails.push_back(std::move(s));
  }
  return powertrace::PowerTrace::rails(std::move(rails));
}

}  // namespace

SimAgent::SimAgent(SimProfile profile, core::DeviceDescriptor device, Clock& clock)
    : profile_(std::move(profile)),
      device_(std::move(device)),
      clock_(clock),
      link_noise_(profile_.seed ^ 0x6c696e6bULL),
      length_noise_(profile_.seed ^ 0x67656e73ULL) {
  profile_.validate();
}

core::DeviceDescriptor SimAgent::device() {
  std::lock_guard lock(mu_);
  return device_;
}

bool SimAgent::supports_power_control() { return device_.lab != core::Lab::Edge; }

void SimAgent::power(orch::PowerAction action) {
  std::lock_guard lock(mu_);
  if (device_.lab == core::Lab::Edge) return;
  if (action == orch::PowerAction::Off) {
    powered_ = false;
    run_.reset();
  } else if (!powered_) {
    powered_ = true;
    ready_at_ns_ = clock_.now_ns() + std::llround(profile_.boot_time_s * 1e9);
  }
}

bool SimAgent::responsive() {
  std::lock_guard lock(mu_);
  return powered_ && !profile_.never_boot && !profile_.unreachable && !disconnected_ && clock_.now_ns() >= ready_at_ns_;
}

void SimAgent::require_up() const {
  if (!powered_ || profile_.never_boot || profile_.unreachable || disconnected_ || clock_.now_ns() < ready_at_ns_)
    throw Error(Errc::AgentUnreachable, "simulated device is not reachable");
}

std::int64_t SimAgent::device_now() const { return clock_.now_ns() + profile_.clock_offset_ns; }

void SimAgent::advance_to(std::int64_t device_ts) {
  const auto now = device_now();
  if (device_ts > now) clock_.sleep_for_ns(device_ts - now);
}

std::int64_t SimAgent::clock_probe(std::int64_t) {
  std::lock_guard lock(mu_);
  require_up();
  const double half = static_cast<double>(profile_.probe_rtt_ns) / 2;
  const double j = profile_.probe_jitter_frac;
  const auto d1 = std::llround(half * (1 + j * (2 * link_noise_.uniform() - 1)));
  const auto d2 = std::llround(half * (1 + j * (2 * link_noise_.uniform() - 1)));
  clock_.sleep_for_ns(d1);
  const auto device_ts = device_now();
  clock_.sleep_for_ns(d2);
  return device_ts;
}

void SimAgent::push(const std::string& path, const std::string& data) {
  std::lock_guard lock(mu_);
  require_up();
  fs_[path] = data;
}

void SimAgent::raise_fault(FaultKind kind, std::int64_t deadline_ns) {
  switch (kind) {
    case FaultKind::Oom:
      run_.reset();
      throw Error(Errc::AgentOom, "app killed: out of memory");
    case FaultKind::Crash:
      run_.reset();
      throw Error(Errc::AgentCrash, "app crashed");
    case FaultKind::Stall:
      clock_.sleep_until_ns(deadline_ns);
      throw Error(Errc::Timeout, "app stalled past the conversation deadline");
    case FaultKind::Disconnect:
      run_.reset();
      disconnected_ = true;
      throw Error(Errc::AgentUnreachable, "device disconnected");
  }
  throw Error(Errc::AgentCrash, "unknown fault");
}

void SimAgent::launch(const orch::LaunchRequest& request) {
  std::lock_guard lock(mu_);
  require_up();
  ++launches_;
  run_ = ActiveRun{request.run_id, request.output_dir, SimState{device_now(), launches_, std::nullopt}, {}};
  std::vector<Event> load;
  try {
    load = sim_model_load(profile_, run_->state);
  } catch (const Error& e) {
    if (e.code() != Errc::SimFault || !run_->state.fired_fault) throw;
    raise_fault(*run_->state.fired_fault, clock_.now_ns());
  }
  advance_to(load.back().ts_ns);
  events_.insert(events_.end(), load.begin(), load.end());
  fs_[request.output_dir + "/load.jsonl"] = write_jsonl(load);
}

void SimAgent::interrupt() {
  std::lock_guard lock(mu_);
  run_.reset();
}

std::int64_t SimAgent::draw_gen_tokens(const orch::PromptRequest& r) {
  if (r.micro && r.gen_tokens) return *r.gen_tokens;
  std::int64_t n = r.gen_tokens ? *r.gen_tokens
                                : std::llround(profile_.macro_gen_mean + length_noise_.next(profile_.macro_gen_std));
  std::int64_t cap = r.max_gen_length > 0 ? r.max_gen_length : n;
  if (r.context_size > 0) cap = std::min(cap, r.context_size - r.prompt_tokens);
  return std::clamp<std::int64_t>(n, 1, std::max<std::int64_t>(cap, 1));
}

orch::PromptResult SimAgent::prompt(const orch::PromptRequest& r) {
  std::lock_guard lock(mu_);
  require_up();
  if (!run_ || run_->run_id != r.run_id) throw Error(Errc::AgentCrash, "app is not running " + r.run_id);
  auto& state = run_->state;
  state.now_ns = std::max(state.now_ns, device_now());
  const auto gen = draw_gen_tokens(r);
  const SimPromptInput in{r.prompt_index, r.conversation_index, r.prompt_tokens, gen,
                          r.first_in_conversation, r.last_in_conversation, r.micro};
  std::vector<Event> events;
  try {
    events = sim_execute_prompt(profile_, in, state);
  } catch (const Error& e) {
    if (e.code() != Errc::SimFault || !state.fired_fault) throw;
    raise_fault(*state.fired_fault, r.deadline_ns);
  }
  if (events.back().ts_ns - profile_.clock_offset_ns > r.deadline_ns) {
    clock_.sleep_until_ns(r.deadline_ns);
    run_.reset();
    throw Error(Errc::Timeout, "prompt " + std::to_string(r.prompt_index) + " ran past the conversation deadline");
  }
  advance_to(events.back().ts_ns);
  events_.insert(events_.end(), events.begin(), events.end());

  char name[32];
  std::snprintf(name, sizeof name, "/prompt_%04lld.jsonl", static_cast<long long>(r.prompt_index));
  fs_[run_->output_dir + name] = write_jsonl(events);
  run_->responses.push_back({{"prompt_index", r.prompt_index},
                             {"conversation_index", r.conversation_index},
                             {"prompt_tokens", r.prompt_tokens},
                             {"generated_tokens", gen}});
  fs_[run_->output_dir + "/responses.json"] = run_->responses.dump(2) + "\n";
  return {gen};
}

orch::FileMap SimAgent::collect(const std::string& prefix) {
  std::lock_guard lock(mu_);
  require_up();
  orch::FileMap out;
  for (auto it = fs_.lower_bound(prefix); it != fs_.end() && it->first.starts_with(prefix); ++it) out.insert(*it);
  return out;
}

orch::Capture SimAgent::capture(std::int64_t t0, std::int64_t t1, double rate_hz) {
  std::lock_guard lock(mu_);
  SampleWindow w{t0, t1, profile_.clock_offset_ns, captures_++};
  SimProfile p = profile_;
  p.sample_rate_hz = rate_hz;
  orch::Capture c{sim_power_trace(p, events_, w), sim_temperature_trace(profile_, events_, w)};
  if (device_.power_source == core::PowerSource::Sysfs) c.power = as_rails(c.power);
  c.power.meta.device_id = device_.id;
  return c;
}

std::vector<Event> SimAgent::device_events() const {
  std::lock_guard lock(mu_);
  return events_;
}

int SimAgent::launches() const {
  std::lock_guard lock(mu_);
  return launches_;
}

core::DeviceDescriptor default_sim_device() {
  core::DeviceDescriptor d;
  d.id = "sim-phone";
  d.lab = core::Lab::Sim;
  d.platform = core::Platform::Sim;
  d.soc = "sim";
  d.mem_gb = 8;
  d.battery_capacity_mah = 4000;
  d.tier = core::Tier::High;
  d.power_source = core::PowerSource::Sim;
  return d;
}

}  // namespace melt::agent
