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

#include "melt/report/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "melt/core/error.hpp"

namespace melt::report {

std::string_view to_string(Level l) { return l == Level::Run ? "run" : "prompt"; }

const std::vector<std::string>& group_key_names() {
  static const std::vector<std::string> names{"device", "model",          "backend",        "quant",
                                              "energy_mode", "context_size", "max_gen_length", "batch_size"};
  return names;
}

std::map<std::string, std::string> group_keys_of(const core::RunManifest& m) {
  const auto& s = m.spec;
  return {{"device", s.device.id},
          {"model", s.model.name},
          {"backend", std::string(core::to_string(s.backend))},
          {"quant", std::string(core::to_string(s.model.quant_scheme)) + "-" + std::to_string(s.model.bitwidth)},
          {"energy_mode", s.device.energy_mode.value_or("")},
          {"context_size", std::to_string(s.context_size)},
          {"max_gen_length", std::to_string(s.max_gen_length)},
          {"batch_size", std::to_string(s.batch_size)}};
}

MeanStd mean_std(std::span<const double> v) {
  MeanStd out;
  out.n = v.size();
  if (v.empty()) return out;
  double sum = 0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

namespace {

using analysis::PromptMetrics;
using PromptField = std::function<std::optional<double>(const PromptMetrics&)>;

const std::vector<std::pair<std::string, PromptField>>& prompt_fields() {
  static const std::vector<std::pair<std::string, PromptField>> fields{
      {"prefill_tps", [](const PromptMetrics& p) { return std::optional(p.prefill_tps); }},
      {"generation_tps", [](const PromptMetrics& p) { return std::optional(p.generation_tps); }},
      {"generated_tokens", [](const PromptMetrics& p) { return std::optional(static_cast<double>(p.generated_tokens)); }},
      {"energy_mwh_per_token", [](const PromptMetrics& p) { return std::optional(p.energy_mwh_per_token); }},
      {"energy_mwh_per_token_gross", [](const PromptMetrics& p) { return std::optional(p.energy_mwh_per_token_gross); }},
      {"energy_mwh_per_inference", [](const PromptMetrics& p) { return std::optional(p.decode_energy.energy_mwh_net); }},
      {"prefill_energy_mwh", [](const PromptMetrics& p) { return std::optional(p.prefill_energy.energy_mwh_net); }},
      {"discharge_mah_per_token", [](const PromptMetrics& p) { return p.discharge_mah_per_token; }},
      {"discharge_mah_per_token_gross", [](const PromptMetrics& p) { return p.discharge_mah_per_token_gross; }},
      {"max_temp_c", [](const PromptMetrics& p) { return p.max_temp_c; }},
  };
  return fields;
}

}  // namespace

AggregateTable aggregate(std::span<const RunReport> reports, const std::vector<std::string>& group_by) {
  if (reports.empty()) throw Error(Errc::EmptyGroup, "no run reports to aggregate");
  AggregateTable table;
  table.key_names = group_by.empty() ? group_key_names() : group_by;
  for (const auto& k : table.key_names)
    if (std::find(group_key_names().begin(), group_key_names().end(), k) == group_key_names().end())
      throw Error(Errc::InvalidArgument, "unknown group key " + k);

  std::map<std::map<std::string, std::string>, std::vector<const RunReport*>> groups;
  for (const auto& r : reports) {
    const auto all = group_keys_of(r.manifest);
    std::map<std::string, std::string> keys;
    for (const auto& k : table.key_names) keys[k] = all.at(k);
    groups[keys].push_back(&r);
  }

  for (const auto& [keys, runs] : groups) {
    std::vector<const RunReport*> ok;
    for (auto* r : runs)
      if (r->manifest.status == core::RunStatus::Ok) ok.push_back(r);
    const std::size_t attrition = runs.size() - ok.size();
    if (ok.empty()) {
      std::string label;
      for (const auto& [k, v] : keys) label += (label.empty() ? "" : ",") + k + "=" + v;
      table.warnings.push_back("group {" + label + "} has no successful runs (" + std::to_string(attrition) + " failed)");
      continue;
    }
    auto add_row = [&](const std::string& metric, Level level, const std::vector<double>& values) {
      if (values.empty()) return;
      const auto s = mean_std(values);
      table.rows.push_back({keys, metric, level, s.mean, s.std, s.n, attrition});
    };

    for (const auto& [name, field] : prompt_fields()) {
      std::vector<double> per_run, per_prompt;
      for (auto* r : ok) {
        std::vector<double> vals;
        for (const auto& p : r->prompts)
          if (auto v = field(p)) vals.push_back(*v);
        if (vals.empty()) continue;
        per_run.push_back(mean_std(vals).mean);
        per_prompt.insert(per_prompt.end(), vals.begin(), vals.end());
      }
      add_row(name, Level::Run, per_run);
      add_row(name, Level::Prompt, per_prompt);
    }

    std::vector<double> load, run_mwh, run_mwh_gross, run_mah;
    for (auto* r : ok) {
      if (!r->prompts.empty() && r->prompts.front().load_time_s) load.push_back(*r->prompts.front().load_time_s);
      if (r->run_energy) {
        run_mwh.push_back(r->run_energy->energy_mwh_net);
        run_mwh_gross.push_back(r->run_energy->energy_mwh_gross);
        if (r->run_energy->charge_mah_net) run_mah.push_back(*r->run_energy->charge_mah_net);
      }
    }
    add_row("load_time_s", Level::Run, load);
    add_row("run_energy_mwh", Level::Run, run_mwh);
    add_row("run_energy_mwh_gross", Level::Run, run_mwh_gross);
    add_row("run_discharge_mah", Level::Run, run_mah);
  }

  std::sort(table.rows.begin(), table.rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    return std::tie(a.keys, a.level, a.metric) < std::tie(b.keys, b.level, b.metric);
  });
  return table;
}

}  // namespace melt::report
