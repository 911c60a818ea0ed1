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

#include "melt/analysis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "melt/core/error.hpp"

namespace melt::analysis {

namespace {

struct PromptSpan {
  std::optional<std::int64_t> prefill_begin, prefill_end, last_decode;
  std::int64_t conversation_index = 0;
  std::int64_t tokens = 0;
  std::int64_t decode_count = 0;
};

std::optional<double> max_temp(const std::optional<powertrace::TempTrace>& temp, double t0, double t1) {
  if (!temp) return std::nullopt;
  std::optional<double> best;
  for (const auto& s : temp->samples)
    if (s.ts_s >= t0 && s.ts_s <= t1) best = std::max(best.value_or(s.temp_c), s.temp_c);
  return best;
}

// Sync error can push an event a little past the capture; anything further
// is left for integrate() to reject.
double clamp_to(const powertrace::PowerTrace& p, double t) {
  if (t < p.t_first() && t >= p.t_first() - kAlignSlackS) return p.t_first();
  if (t > p.t_last() && t <= p.t_last() + kAlignSlackS) return p.t_last();
  return t;
}

}  // namespace

std::vector<PromptMetrics> prompt_metrics(const AlignedTimeline& tl,
                                          const std::optional<powertrace::BaselinePower>& baseline) {
  agent::check_well_formed(tl.events);

  std::map<std::int64_t, PromptSpan> spans;
  std::optional<std::int64_t> load_begin;
  std::optional<double> load_time;
  for (const auto& e : tl.events) {
    if (e.kind == agent::EventKind::ModelLoad) {
      if (e.phase == agent::EventPhase::Begin) load_begin = e.ts_ns;
      else if (e.phase == agent::EventPhase::End && load_begin && !load_time)
        load_time = static_cast<double>(e.ts_ns - *load_begin) * 1e-9;
      continue;
    }
    if (e.kind != agent::EventKind::Prefill && e.kind != agent::EventKind::DecodeToken) continue;
    const auto pi = e.int_attr("prompt_index");
    if (!pi) throw Error(Errc::MalformedTrace, "prompt event without prompt_index");
    auto& s = spans[*pi];
    if (e.kind == agent::EventKind::DecodeToken) {
      if (!s.prefill_end) throw Error(Errc::MalformedTrace, "decode_token before prefill end in prompt " + std::to_string(*pi));
      s.last_decode = e.ts_ns;
      ++s.decode_count;
    } else if (e.phase == agent::EventPhase::Begin) {
      if (s.prefill_begin) throw Error(Errc::MalformedTrace, "repeated prefill in prompt " + std::to_string(*pi));
      s.prefill_begin = e.ts_ns;
      s.tokens = e.int_attr("tokens").value_or(0);
      s.conversation_index = e.int_attr("conversation_index").value_or(0);
    } else if (e.phase == agent::EventPhase::End) {
      s.prefill_end = e.ts_ns;
    }
  }

  const bool have_power = tl.power.size() >= 2;
  std::vector<PromptMetrics> out;
  for (const auto& [pi, s] : spans) {
    const std::string where = " in prompt " + std::to_string(pi);
    if (!s.prefill_begin || !s.prefill_end) throw Error(Errc::MalformedTrace, "incomplete prefill" + where);
    if (!s.last_decode) throw Error(Errc::MalformedTrace, "no decode tokens" + where);
    if (s.tokens <= 0) throw Error(Errc::MalformedTrace, "prefill without a positive token count" + where);
    PromptMetrics m;
    m.prompt_index = pi;
    m.conversation_index = s.conversation_index;
    m.prompt_tokens = s.tokens;
    m.generated_tokens = s.decode_count;
    m.prefill_s = static_cast<double>(*s.prefill_end - *s.prefill_begin) * 1e-9;
    m.decode_s = static_cast<double>(*s.last_decode - *s.prefill_end) * 1e-9;
    if (!(m.prefill_s > 0) || !(m.decode_s > 0)) throw Error(Errc::MalformedTrace, "zero-length phase" + where);
    m.prefill_tps = static_cast<double>(m.prompt_tokens) / m.prefill_s;
    m.generation_tps = static_cast<double>(m.generated_tokens) / m.decode_s;

    const double pb = tl.trace_seconds(*s.prefill_begin);
    const double pe = tl.trace_seconds(*s.prefill_end);
    const double de = tl.trace_seconds(*s.last_decode);
    if (have_power) {
      m.prefill_energy = integrate(tl.power, clamp_to(tl.power, pb), clamp_to(tl.power, pe), baseline);
      m.decode_energy = integrate(tl.power, clamp_to(tl.power, pe), clamp_to(tl.power, de), baseline);
      const double n = static_cast<double>(m.generated_tokens);
      m.energy_mwh_per_token = m.decode_energy.energy_mwh_net / n;
      m.energy_mwh_per_token_gross = m.decode_energy.energy_mwh_gross / n;
      if (m.decode_energy.charge_mah_net) {
        m.discharge_mah_per_token = *m.decode_energy.charge_mah_net / n;
        m.discharge_mah_per_token_gross = *m.decode_energy.charge_mah_gross / n;
      }
    }
    m.max_temp_c = max_temp(tl.temperature, pb, de);
    out.push_back(std::move(m));
  }
  if (!out.empty() && load_time) out.front().load_time_s = load_time;
  return out;
}

double battery_projection(double capacity_mah, double per_prompt_discharge_mah) {
  if (!(capacity_mah > 0) || !(per_prompt_discharge_mah > 0) || !std::isfinite(capacity_mah) ||
      !std::isfinite(per_prompt_discharge_mah))
    throw Error(Errc::NonPositiveInput, "capacity and discharge must be positive");
  return capacity_mah / per_prompt_discharge_mah;
}

}  // namespace melt::analysis
