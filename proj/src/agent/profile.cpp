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

#include "melt/agent/profile.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"

namespace melt::agent {

namespace {

const char* fault_name(FaultKind k) {
  switch (k) {
    case FaultKind::Oom: return "oom";
    case FaultKind::Crash: return "crash";
    case FaultKind::Stall: return "stall";
    case FaultKind::Disconnect: return "disconnect";
  }
  return "?";
}

FaultKind parse_fault(const std::string& s) {
  if (s == "oom") return FaultKind::Oom;
  if (s == "crash") return FaultKind::Crash;
  if (s == "stall") return FaultKind::Stall;
  if (s == "disconnect") return FaultKind::Disconnect;
  throw Error(Errc::MalformedConfig, "unknown fault kind '" + s + "'");
}

}  // namespace

void SimProfile::validate() const {
  auto bad = [](const std::string& what) { return Error(Errc::MalformedConfig, "sim profile: " + what); };
  if (!(prefill_rate_tps > 0) || !(decode_rate_tps > 0)) throw bad("rates must be positive");
  if (!(sample_rate_hz > 0) || !(temp_sample_rate_hz > 0)) throw bad("sample rates must be positive");
  if (load_time_s < 0 || tail_tau_s < 0 || inter_prompt_gap_s < 0 || boot_time_s < 0) throw bad("negative duration");
  if (idle_power_mw < 0 || load_power_mw < 0 || prefill_power_mw < 0 || decode_power_mw < 0)
    throw bad("power levels must be non-negative");
  if (!(voltage_v > 0)) throw bad("voltage must be positive");
  if (noise_std_mw < 0 || temp_noise_std_c < 0 || macro_gen_std < 0) throw bad("negative std");
  if (!(thermal_tau_s > 0)) throw bad("thermal_tau_s must be positive");
  if (probe_rtt_ns < 0 || probe_jitter_frac < 0 || probe_jitter_frac > 1) throw bad("bad probe link");
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (const auto& s : power_states) {
    if (!(s.rate_scale > 0) || s.rate_scale > 1) throw bad("rate_scale must be in (0, 1]");
    if (s.power_scale < 0) throw bad("power_scale must be non-negative");
    if (s.after_prompt <= prev) throw bad("power_states must be ordered by after_prompt");
    prev = s.after_prompt;
  }
  for (const auto& [stage, ops] : op_breakdown) {
    double total = 0;
    for (const auto& op : ops) total += op.share;
    if (total > 1 + 1e-9) throw bad("op shares of stage " + stage + " exceed 1");
  }
}

PowerState SimProfile::state_for(std::int64_t prompt_index) const {
  PowerState active{};
  for (const auto& s : power_states)
    if (prompt_index > s.after_prompt) active = s;
  return active;
}

void to_json(nlohmann::json& j, const SimProfile& p) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : p.power_states)
    states.push_back({{"after_prompt", s.after_prompt}, {"rate_scale", s.rate_scale}, {"power_scale", s.power_scale}});
  nlohmann::json ops = nlohmann::json::object();
  for (const auto& [stage, list] : p.op_breakdown) {
    auto& arr = ops[stage] = nlohmann::json::array();
    for (const auto& op : list) arr.push_back({{"name", op.name}, {"share", op.share}});
  }
  nlohmann::json faults = nlohmann::json::array();
  for (const auto& f : p.faults) faults.push_back({{"kind", fault_name(f.kind)}, {"run", f.run}, {"prompt", f.prompt}});
  j = nlohmann::json{{"prefill_rate_tps", p.prefill_rate_tps},
                     {"decode_rate_tps", p.decode_rate_tps},
                     {"load_time_s", p.load_time_s},
                     {"power_states", states},
                     {"idle_power_mw", p.idle_power_mw},
                     {"load_power_mw", p.load_power_mw},
                     {"prefill_power_mw", p.prefill_power_mw},
                     {"decode_power_mw", p.decode_power_mw},
                     {"voltage_v", p.voltage_v},
                     {"sample_rate_hz", p.sample_rate_hz},
                     {"noise_std_mw", p.noise_std_mw},
                     {"seed", p.seed},
                     {"tail_tau_s", p.tail_tau_s},
                     {"inter_prompt_gap_s", p.inter_prompt_gap_s},
                     {"ambient_c", p.ambient_c},
                     {"thermal_gain_c_per_w", p.thermal_gain_c_per_w},
                     {"thermal_tau_s", p.thermal_tau_s},
                     {"temp_sample_rate_hz", p.temp_sample_rate_hz},
                     {"temp_noise_std_c", p.temp_noise_std_c},
                     {"temp_sensor", p.temp_sensor},
                     {"macro_gen_mean", p.macro_gen_mean},
                     {"macro_gen_std", p.macro_gen_std},
                     {"op_breakdown", ops},
                     {"clock_offset_ns", p.clock_offset_ns},
                     {"probe_rtt_ns", p.probe_rtt_ns},
                     {"probe_jitter_frac", p.probe_jitter_frac},
                     {"boot_time_s", p.boot_time_s},
                     {"never_boot", p.never_boot},
                     {"unreachable", p.unreachable},
                     {"faults", faults}};
}

void from_json(const nlohmann::json& j, SimProfile& p) {
  core::check_keys(j,
                   {"prefill_rate_tps", "decode_rate_tps", "load_time_s", "power_states", "idle_power_mw",
                    "load_power_mw", "prefill_power_mw", "decode_power_mw", "voltage_v", "sample_rate_hz",
                    "noise_std_mw", "seed", "tail_tau_s", "inter_prompt_gap_s", "ambient_c", "thermal_gain_c_per_w",
                    "thermal_tau_s", "temp_sample_rate_hz", "temp_noise_std_c", "temp_sensor", "macro_gen_mean",
                    "macro_gen_std", "op_breakdown", "clock_offset_ns", "probe_rtt_ns", "probe_jitter_frac",
                    "boot_time_s", "never_boot", "unreachable", "faults"},
                   "sim profile");
  SimProfile d;
  auto get = [&](const char* key, auto& field) {
    if (auto it = j.find(key); it != j.end()) field = it->get<std::decay_t<decltype(field)>>();
  };
  get("prefill_rate_tps", d.prefill_rate_tps);
  get("decode_rate_tps", d.decode_rate_tps);
  get("load_time_s", d.load_time_s);
  if (auto it = j.find("power_states"); it != j.end()) {
    for (const auto& s : *it) {
      core::check_keys(s, {"after_prompt", "rate_scale", "power_scale"}, "power_state");
      d.power_states.push_back(
          {s.at("after_prompt").get<std::int64_t>(), s.value("rate_scale", 1.0), s.value("power_scale", 1.0)});
    }
  }
  get("idle_power_mw", d.idle_power_mw);
  get("load_power_mw", d.load_power_mw);
  get("prefill_power_mw", d.prefill_power_mw);
  get("decode_power_mw", d.decode_power_mw);
  get("voltage_v", d.voltage_v);
  get("sample_rate_hz", d.sample_rate_hz);
  get("noise_std_mw", d.noise_std_mw);
  get("seed", d.seed);
  get("tail_tau_s", d.tail_tau_s);
  get("inter_prompt_gap_s", d.inter_prompt_gap_s);
  get("ambient_c", d.ambient_c);
  get("thermal_gain_c_per_w", d.thermal_gain_c_per_w);
  get("thermal_tau_s", d.thermal_tau_s);
  get("temp_sample_rate_hz", d.temp_sample_rate_hz);
  get("temp_noise_std_c", d.temp_noise_std_c);
  get("temp_sensor", d.temp_sensor);
  get("macro_gen_mean", d.macro_gen_mean);
  get("macro_gen_std", d.macro_gen_std);
  if (auto it = j.find("op_breakdown"); it != j.end()) {
    for (const auto& [stage, list] : it->items()) {
      auto& ops = d.op_breakdown[stage];
      for (const auto& op : list) {
        core::check_keys(op, {"name", "share"}, "op share");
        ops.push_back({op.at("name").get<std::string>(), op.at("share").get<double>()});
      }
    }
  }
  get("clock_offset_ns", d.clock_offset_ns);
  get("probe_rtt_ns", d.probe_rtt_ns);
  get("probe_jitter_frac", d.probe_jitter_frac);
  get("boot_time_s", d.boot_time_s);
  get("never_boot", d.never_boot);
  get("unreachable", d.unreachable);
  if (auto it = j.find("faults"); it != j.end()) {
    for (const auto& f : *it) {
      core::check_keys(f, {"kind", "run", "prompt"}, "fault");
      d.faults.push_back({parse_fault(f.at("kind").get<std::string>()), f.value("run", 1),
                          f.value("prompt", std::int64_t{0})});
    }
  }
  d.validate();
  p = std::move(d);
}

SimProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open profile " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j.get<SimProfile>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedConfig, path.string() + ": " + e.what());
  }
}

}  // namespace melt::agent
