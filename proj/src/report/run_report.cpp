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

#include "melt/report/run_report.hpp"

#include <algorithm>
#include <set>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"

namespace {

using nlohmann::json;

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j[key].is_null()) v = j[key].get<T>();
  else v.reset();
}

}  // namespace

namespace melt::analysis {

void to_json(json& j, const EnergyWindow& w) {
  j = json{{"t0", w.t0},
           {"t1", w.t1},
           {"energy_mwh_gross", w.energy_mwh_gross},
           {"energy_mwh_net", w.energy_mwh_net},
           {"negative_net_flag", w.negative_net_flag}};
  put_opt(j, "charge_mah_gross", w.charge_mah_gross);
  put_opt(j, "charge_mah_net", w.charge_mah_net);
}

void from_json(const json& j, EnergyWindow& w) {
  core::check_keys(j,
                   {"t0", "t1", "energy_mwh_gross", "energy_mwh_net", "negative_net_flag", "charge_mah_gross",
                    "charge_mah_net"},
                   "energy window");
  j.at("t0").get_to(w.t0);
  j.at("t1").get_to(w.t1);
  j.at("energy_mwh_gross").get_to(w.energy_mwh_gross);
  j.at("energy_mwh_net").get_to(w.energy_mwh_net);
  j.at("negative_net_flag").get_to(w.negative_net_flag);
  get_opt(j, "charge_mah_gross", w.charge_mah_gross);
  get_opt(j, "charge_mah_net", w.charge_mah_net);
}

void to_json(json& j, const PromptMetrics& m) {
  j = json{{"prompt_index", m.prompt_index},
           {"conversation_index", m.conversation_index},
           {"prompt_tokens", m.prompt_tokens},
           {"generated_tokens", m.generated_tokens},
           {"prefill_s", m.prefill_s},
           {"decode_s", m.decode_s},
           {"prefill_tps", m.prefill_tps},
           {"generation_tps", m.generation_tps},
           {"prefill_energy", m.prefill_energy},
           {"decode_energy", m.decode_energy},
           {"energy_mwh_per_token", m.energy_mwh_per_token},
           {"energy_mwh_per_token_gross", m.energy_mwh_per_token_gross}};
  put_opt(j, "discharge_mah_per_token", m.discharge_mah_per_token);
  put_opt(j, "discharge_mah_per_token_gross", m.discharge_mah_per_token_gross);
  put_opt(j, "load_time_s", m.load_time_s);
  put_opt(j, "max_temp_c", m.max_temp_c);
}

void from_json(const json& j, PromptMetrics& m) {
  j.at("prompt_index").get_to(m.prompt_index);
  j.at("conversation_index").get_to(m.conversation_index);
  j.at("prompt_tokens").get_to(m.prompt_tokens);
  j.at("generated_tokens").get_to(m.generated_tokens);
  j.at("prefill_s").get_to(m.prefill_s);
  j.at("decode_s").get_to(m.decode_s);
  j.at("prefill_tps").get_to(m.prefill_tps);
  j.at("generation_tps").get_to(m.generation_tps);
  j.at("prefill_energy").get_to(m.prefill_energy);
  j.at("decode_energy").get_to(m.decode_energy);
  j.at("energy_mwh_per_token").get_to(m.energy_mwh_per_token);
  j.at("energy_mwh_per_token_gross").get_to(m.energy_mwh_per_token_gross);
  get_opt(j, "discharge_mah_per_token", m.discharge_mah_per_token);
  get_opt(j, "discharge_mah_per_token_gross", m.discharge_mah_per_token_gross);
  get_opt(j, "load_time_s", m.load_time_s);
  get_opt(j, "max_temp_c", m.max_temp_c);
}

void to_json(json& j, const DegradationReport& d) {
  j = json{{"series", d.series},
           {"changepoints", d.changepoints},
           {"window_w", d.window_w},
           {"drop_threshold", d.drop_threshold}};
}

void from_json(const json& j, DegradationReport& d) {
  j.at("series").get_to(d.series);
  j.at("changepoints").get_to(d.changepoints);
  j.at("window_w").get_to(d.window_w);
  j.at("drop_threshold").get_to(d.drop_threshold);
}

void to_json(json& j, const SensorSummary& s) {
  j = json{{"max_c", s.max_c}, {"mean_c", s.mean_c}, {"count", s.count}};
}

void from_json(const json& j, SensorSummary& s) {
  j.at("max_c").get_to(s.max_c);
  j.at("mean_c").get_to(s.mean_c);
  j.at("count").get_to(s.count);
}

void to_json(json& j, const ThermalSummary& t) {
  j = json{{"max_c", t.max_c}, {"mean_c", t.mean_c}, {"sensors", t.sensors}};
}

void from_json(const json& j, ThermalSummary& t) {
  j.at("max_c").get_to(t.max_c);
  j.at("mean_c").get_to(t.mean_c);
  j.at("sensors").get_to(t.sensors);
}

void to_json(json& j, const OpSummary& o) { j = json{{"total_us", o.total_us}, {"share", o.share}, {"count", o.count}}; }

void from_json(const json& j, OpSummary& o) {
  j.at("total_us").get_to(o.total_us);
  j.at("share").get_to(o.share);
  j.at("count").get_to(o.count);
}

}  // namespace melt::analysis

namespace melt::powertrace {

void to_json(json& j, const BaselinePower& b) {
  j = json{{"mean_power_mw", b.mean_power_mw}, {"t0", b.t0}, {"t1", b.t1}, {"sample_count", b.sample_count}};
}

void from_json(const json& j, BaselinePower& b) {
  j.at("mean_power_mw").get_to(b.mean_power_mw);
  j.at("t0").get_to(b.t0);
  j.at("t1").get_to(b.t1);
  j.at("sample_count").get_to(b.sample_count);
}

}  // namespace melt::powertrace

namespace melt::report {

RunReport analyze_run(const analysis::AlignedTimeline& tl, const AnalyzeOptions& options) {
  RunReport r;
  r.manifest = tl.manifest;
  r.partial = tl.partial;
  const bool ok = tl.manifest.status == core::RunStatus::Ok;
  const bool have_power = tl.power.size() >= 2;
  if (tl.partial) r.notes.push_back("events fall outside the power trace; run is partial");
  if (!have_power) r.notes.push_back("no usable power trace");

  if (options.baseline_window) {
    r.baseline = powertrace::estimate_baseline(tl.power, options.baseline_window->first, options.baseline_window->second);
  } else if (have_power && tl.manifest.idle_lead_s > 0) {
    try {
      r.baseline = powertrace::estimate_baseline(tl.power, 0, tl.manifest.idle_lead_s);
    } catch (const Error& e) {
      r.notes.push_back(std::string("baseline not estimated: ") + e.what());
    }
  }
  if (!r.baseline) r.notes.push_back("net values equal gross values (no baseline)");

  try {
    r.prompts = analysis::prompt_metrics(tl, r.baseline);
  } catch (const Error& e) {
    if (ok) throw;
    r.notes.push_back(std::string("prompt metrics unavailable: ") + e.what());
  }

  double w0 = 0, w1 = 0;
  if (have_power) {
    w0 = tl.manifest.mark_start_ns ? tl.trace_seconds(*tl.manifest.mark_start_ns) : tl.manifest.idle_lead_s;
    w1 = tl.manifest.mark_stop_ns ? tl.trace_seconds(*tl.manifest.mark_stop_ns) : tl.power.t_last();
    w0 = std::clamp(w0, tl.power.t_first(), tl.power.t_last());
    w1 = std::clamp(w1, tl.power.t_first(), tl.power.t_last());
    if (w0 < w1) r.run_energy = analysis::integrate(tl.power, w0, w1, r.baseline);
  }

  if (r.prompts.size() >= 2 * options.degradation_window + 1) {
    std::vector<double> tps;
    for (const auto& p : r.prompts) tps.push_back(p.generation_tps);
    r.degradation = analysis::detect_degradation(tps, options.degradation_window, options.drop_fraction);
  }

  if (tl.temperature && !tl.temperature->empty()) {
    const double t0 = r.run_energy ? w0 : tl.temperature->samples.front().ts_s;
    const double t1 = r.run_energy ? w1 : tl.temperature->samples.back().ts_s;
    try {
      r.thermal = analysis::thermal_summary(*tl.temperature, t0, t1);
    } catch (const Error& e) {
      r.notes.push_back(std::string("thermal summary unavailable: ") + e.what());
    }
  }

  std::set<std::string> stages;
  for (const auto& e : tl.events)
    if (e.kind == agent::EventKind::Op)
      if (auto s = e.string_attr("stage")) stages.insert(*s);
  for (const auto& s : stages) r.ops[s] = analysis::per_op_summary(tl.events, s);

  r.negative_net = r.run_energy && r.run_energy->negative_net_flag;
  for (const auto& p : r.prompts)
    r.negative_net = r.negative_net || p.prefill_energy.negative_net_flag || p.decode_energy.negative_net_flag;
  if (r.negative_net) r.notes.push_back("a window integrates below baseline");
  if (!r.prompts.empty())
    r.notes.push_back("per-token values use the decode window (prefill end to last token); prefill energy is separate");
  return r;
}

void to_json(json& j, const RunReport& r) {
  j = json{{"manifest", r.manifest}, {"prompts", r.prompts}, {"ops", r.ops},
           {"partial", r.partial},   {"negative_net", r.negative_net}, {"notes", r.notes}};
  put_opt(j, "run_energy", r.run_energy);
  put_opt(j, "baseline", r.baseline);
  put_opt(j, "degradation", r.degradation);
  put_opt(j, "thermal", r.thermal);
}

void from_json(const json& j, RunReport& r) {
  core::check_keys(j,
                   {"manifest", "prompts", "ops", "partial", "negative_net", "notes", "run_energy", "baseline",
                    "degradation", "thermal"},
                   "run report");
  j.at("manifest").get_to(r.manifest);
  j.at("prompts").get_to(r.prompts);
  j.at("ops").get_to(r.ops);
  j.at("partial").get_to(r.partial);
  j.at("negative_net").get_to(r.negative_net);
  j.at("notes").get_to(r.notes);
  get_opt(j, "run_energy", r.run_energy);
  get_opt(j, "baseline", r.baseline);
  get_opt(j, "degradation", r.degradation);
  get_opt(j, "thermal", r.thermal);
}

}  // namespace melt::report
