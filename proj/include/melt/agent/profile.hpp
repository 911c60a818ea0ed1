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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace melt::agent {

/// Rate/power scaling that applies to every prompt with index > after_prompt.
struct PowerState {
  std::int64_t after_prompt = 0;
  double rate_scale = 1.0;
  double power_scale = 1.0;
  bool operator==(const PowerState&) const = default;
};

struct OpShare {
  std::string name;
  double share = 0;  // fraction of the stage duration
  bool operator==(const OpShare&) const = default;
};

enum class FaultKind { Oom, Crash, Stall, Disconnect };

/// Fires on the `run`-th launch (1-based) at prompt index `prompt`
/// (0-based within the run; -1 means during model load).
struct FaultSpec {
  FaultKind kind = FaultKind::Crash;
  int run = 1;
  std::int64_t prompt = 0;
  bool operator==(const FaultSpec&) const = default;
};

struct SimProfile {
  double prefill_rate_tps = 80;
  double decode_rate_tps = 25;
  double load_time_s = 2.41;
  std::vector<PowerState> power_states;

  double idle_power_mw = 380;
  double load_power_mw = 3000;
  double prefill_power_mw = 6000;
  double decode_power_mw = 5000;
  double voltage_v = 3.8;
  double sample_rate_hz = 5000;
  double noise_std_mw = 0;
  std::uint64_t seed = 0;
  // Post-activity decay back to idle; 0 disables the tail.
  double tail_tau_s = 1.0;
  double inter_prompt_gap_s = 0;

  double ambient_c = 25;
  double thermal_gain_c_per_w = 4.0;
  double thermal_tau_s = 30;
  double temp_sample_rate_hz = 10;
  double temp_noise_std_c = 0;
  std::string temp_sensor = "soc";

  // Macro mode draws lengths from N(mean, std) when a prompt has none.
  double macro_gen_mean = 135;
  double macro_gen_std = 40;

  // stage ("prefill", "decode") -> op shares, emitted in micro mode.
  std::map<std::string, std::vector<OpShare>> op_breakdown;

  // Device/link behaviour.
  std::int64_t clock_offset_ns = 0;
  std::int64_t probe_rtt_ns = 0;
  double probe_jitter_frac = 0;
  double boot_time_s = 0.5;
  bool never_boot = false;
  bool unreachable = false;
  std::vector<FaultSpec> faults;

  /// Throws Error(MalformedConfig) on broken invariants.
  void validate() const;
  /// power_state for a prompt index, identity when none applies.
  PowerState state_for(std::int64_t prompt_index) const;

  bool operator==(const SimProfile&) const = default;
};

void to_json(nlohmann::json& j, const SimProfile& p);
/// Unknown keys are rejected; absent keys keep their defaults.
void from_json(const nlohmann::json& j, SimProfile& p);
SimProfile load_profile(const std::filesystem::path& path);

}  // namespace melt::agent
