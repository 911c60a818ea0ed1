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
#include <random>
#include <span>
#include <vector>

#include "melt/agent/event.hpp"
#include "melt/agent/profile.hpp"
#include "melt/powertrace/trace.hpp"

namespace melt::agent {

struct SimPromptInput {
  std::int64_t prompt_index = 0;
  std::int64_t conversation_index = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t gen_tokens = 0;
  bool first_in_conversation = false;
  bool last_in_conversation = false;
  bool trace_ops = false;
};

/// Device-side cursor carried between prompts of one run.
struct SimState {
  std::int64_t now_ns = 0;  // device timebase
  int run_ordinal = 1;      // 1-based launch count, matched against faults
  std::optional<FaultKind> fired_fault;
};

/// The fault configured for (run, prompt), if any.
std::optional<FaultSpec> find_fault(const SimProfile& profile, int run, std::int64_t prompt_index);

/// Emits the timing of one prompt starting at state.now_ns: optional idle
/// gap, prefill begin/end over prompt_tokens / prefill rate, then gen_tokens
/// decode_token instants spaced 1 / decode rate after prefill end. Rates are
/// scaled by the active power state. Advances state.now_ns to the last
/// event. Throws SimFault (and sets fired_fault) when a fault is configured
/// for this prompt, and InvalidArgument for non-positive counts.
std::vector<Event> sim_execute_prompt(const SimProfile& profile, const SimPromptInput& input, SimState& state);

/// model_load begin/end spanning load_time_s from state.now_ns.
std::vector<Event> sim_model_load(const SimProfile& profile, SimState& state);

/// Noise-free instantaneous power implied by a device event history: the
/// phase level (load, prefill, decode; scaled per prompt) while a phase is
/// active, otherwise idle plus an exponential tail from the last level.
class PowerModel {
 public:
  PowerModel(const SimProfile& profile, std::span<const Event> events);

  double at(std::int64_t device_ns) const;

  struct Interval {
    std::int64_t begin_ns;
    std::int64_t end_ns;
    double level_mw;
  };
  const std::vector<Interval>& intervals() const { return intervals_; }

 private:
  double idle_mw_;
  double tau_s_;
  std::vector<Interval> intervals_;
};

/// Host window to sample. Host time = device time - device_offset_ns.
struct SampleWindow {
  std::int64_t host_t0_ns = 0;
  std::int64_t host_t1_ns = 0;
  std::int64_t device_offset_ns = 0;
  std::uint64_t stream = 0;  // mixed into the seed so windows draw independent noise
};

/// Default window: first event to last event plus five tail constants,
/// with host == device time.
SampleWindow default_window(const SimProfile& profile, std::span<const Event> events);

/// Samples at profile.sample_rate_hz from host_t0 through the first tick
/// at or after host_t1; ts_s is relative to host_t0. Current = (power + N(0, noise_std)) / voltage.
powertrace::PowerTrace sim_power_trace(const SimProfile& profile, std::span<const Event> events,
                                       const SampleWindow& window);
powertrace::PowerTrace sim_power_trace(const SimProfile& profile, std::span<const Event> events);

/// First-order thermal response toward ambient + gain * P(t), starting at
/// equilibrium with the power at the window start.
powertrace::TempTrace sim_temperature_trace(const SimProfile& profile, std::span<const Event> events,
                                            const SampleWindow& window);
powertrace::TempTrace sim_temperature_trace(const SimProfile& profile, std::span<const Event> events);

/// Box-Muller over mt19937_64 so seeded noise is identical on every
/// standard library.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}
  double next(double stddev);
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

}  // namespace melt::agent
