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

#include "melt/agent/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "melt/core/error.hpp"

namespace melt::agent {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::int64_t span_ns(double seconds) { return std::llround(seconds * 1e9); }

Event make(std::int64_t ts, EventKind kind, EventPhase phase, std::map<std::string, AttrValue> attrs = {}) {
  return Event{ts, kind, phase, std::move(attrs)};
}

// Op instants laid out back-to-back from `begin` over a stage of `dur_ns`.
void emit_ops(const SimProfile& profile, const std::string& stage, std::int64_t begin, std::int64_t dur_ns,
              std::int64_t prompt_index, std::vector<Event>& out) {
  auto it = profile.op_breakdown.find(stage);
  if (it == profile.op_breakdown.end()) return;
  double offset = 0;
  for (const auto& op : it->second) {
    const double op_ns = op.share * static_cast<double>(dur_ns);
    out.push_back(make(begin + std::llround(offset), EventKind::Op, EventPhase::Instant,
                       {{"op_name", op.name},
                        {"stage", stage},
                        {"duration_us", op_ns / 1000.0},
                        {"prompt_index", prompt_index}}));
    offset += op_ns;
  }
}

}  // namespace

double GaussianNoise::next(double stddev) {
  if (stddev == 0) return 0;
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v * stddev;
  }
  double u1 = uniform();
  while (u1 <= 0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  return r * std::cos(kTwoPi * u2) * stddev;
}

double GaussianNoise::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::optional<FaultSpec> find_fault(const SimProfile& profile, int run, std::int64_t prompt_index) {
  for (const auto& f : profile.faults)
    if (f.run == run && f.prompt == prompt_index) return f;
  return std::nullopt;
}

std::vector<Event> sim_model_load(const SimProfile& profile, SimState& state) {
  if (auto f = find_fault(profile, state.run_ordinal, -1)) {
    state.fired_fault = f->kind;
    throw Error(Errc::SimFault, "fault during model load");
  }
  std::vector<Event> out;
  const auto begin = state.now_ns;
  const auto end = begin + span_ns(profile.load_time_s);
  out.push_back(make(begin, EventKind::ModelLoad, EventPhase::Begin));
  out.push_back(make(end, EventKind::ModelLoad, EventPhase::End));
  state.now_ns = end;
  return out;
}

std::vector<Event> sim_execute_prompt(const SimProfile& profile, const SimPromptInput& in, SimState& state) {
  if (in.prompt_tokens <= 0 || in.gen_tokens <= 0)
    throw Error(Errc::InvalidArgument, "prompt and generation token counts must be positive");
  if (auto f = find_fault(profile, state.run_ordinal, in.prompt_index)) {
    state.fired_fault = f->kind;
    throw Error(Errc::SimFault, "fault at prompt " + std::to_string(in.prompt_index));
  }
  const auto ps = profile.state_for(in.prompt_index);
  const double prefill_rate = profile.prefill_rate_tps * ps.rate_scale;
  const double decode_rate = profile.decode_rate_tps * ps.rate_scale;

  std::vector<Event> out;
  std::int64_t t = state.now_ns;
  if (profile.inter_prompt_gap_s > 0 && in.prompt_index > 0) {
    out.push_back(make(t, EventKind::Idle, EventPhase::Begin, {{"prompt_index", in.prompt_index}}));
    t += span_ns(profile.inter_prompt_gap_s);
    out.push_back(make(t, EventKind::Idle, EventPhase::End, {{"prompt_index", in.prompt_index}}));
  }
  if (in.first_in_conversation)
    out.push_back(make(t, EventKind::Conversation, EventPhase::Begin, {{"conversation_index", in.conversation_index}}));

  const std::int64_t prefill_ns = span_ns(static_cast<double>(in.prompt_tokens) / prefill_rate);
  out.push_back(make(t, EventKind::Prefill, EventPhase::Begin,
                     {{"prompt_index", in.prompt_index},
                      {"conversation_index", in.conversation_index},
                      {"tokens", in.prompt_tokens}}));
  if (in.trace_ops) emit_ops(profile, "prefill", t, prefill_ns, in.prompt_index, out);
  const std::int64_t prefill_end = t + prefill_ns;
  out.push_back(make(prefill_end, EventKind::Prefill, EventPhase::End,
                     {{"prompt_index", in.prompt_index}, {"conversation_index", in.conversation_index}}));

  std::int64_t prev = prefill_end;
  for (std::int64_t k = 1; k <= in.gen_tokens; ++k) {
    const std::int64_t ts = prefill_end + std::llround(static_cast<double>(k) * 1e9 / decode_rate);
    if (in.trace_ops) emit_ops(profile, "decode", prev, ts - prev, in.prompt_index, out);
    out.push_back(make(ts, EventKind::DecodeToken, EventPhase::Instant,
                       {{"prompt_index", in.prompt_index}, {"token_index", k - 1}}));
    prev = ts;
  }
  if (in.last_in_conversation)
    out.push_back(make(prev, EventKind::Conversation, EventPhase::End, {{"conversation_index", in.conversation_index}}));
  state.now_ns = prev;
  return out;
}

PowerModel::PowerModel(const SimProfile& profile, std::span<const Event> events)
    : idle_mw_(profile.idle_power_mw), tau_s_(profile.tail_tau_s) {
  std::optional<std::int64_t> load_begin;
  std::map<std::int64_t, std::int64_t> prefill_begin, prefill_end, last_decode;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::ModelLoad:
        if (e.phase == EventPhase::Begin) load_begin = e.ts_ns;
        else if (e.phase == EventPhase::End && load_begin) {
          intervals_.push_back({*load_begin, e.ts_ns, profile.load_power_mw});
          load_begin.reset();
        }
        break;
      case EventKind::Prefill: {
        const auto pi = e.int_attr("prompt_index").value_or(-1);
        if (e.phase == EventPhase::Begin) prefill_begin[pi] = e.ts_ns;
        else if (e.phase == EventPhase::End) prefill_end[pi] = e.ts_ns;
        break;
      }
      case EventKind::DecodeToken:
        last_decode[e.int_attr("prompt_index").value_or(-1)] = e.ts_ns;
        break;
      default:
        break;
    }
  }
  for (const auto& [pi, end] : prefill_end) {
    const double scale = profile.state_for(pi).power_scale;
    if (auto b = prefill_begin.find(pi); b != prefill_begin.end())
      intervals_.push_back({b->second, end, profile.prefill_power_mw * scale});
    if (auto d = last_decode.find(pi); d != last_decode.end())
      intervals_.push_back({end, d->second, profile.decode_power_mw * scale});
  }
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.begin_ns < b.begin_ns; });
}

double PowerModel::at(std::int64_t t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](std::int64_t v, const Interval& iv) { return v < iv.begin_ns; });
  if (it == intervals_.begin()) return idle_mw_;
  const auto& iv = *(it - 1);
  if (t < iv.end_ns) return iv.level_mw;
  if (tau_s_ <= 0) return t == iv.end_ns ? iv.level_mw : idle_mw_;
  const double dt = static_cast<double>(t - iv.end_ns) * 1e-9;
  return idle_mw_ + (iv.level_mw - idle_mw_) * std::exp(-dt / tau_s_);
}

SampleWindow default_window(const SimProfile& profile, std::span<const Event> events) {
  SampleWindow w;
  if (events.empty()) return w;
  w.host_t0_ns = events.front().ts_ns;
  w.host_t1_ns = events.back().ts_ns + span_ns(5 * profile.tail_tau_s);
  if (w.host_t1_ns <= w.host_t0_ns) w.host_t1_ns = w.host_t0_ns + span_ns(1.0 / profile.sample_rate_hz);
  return w;
}

namespace {

template <class F>
void for_each_tick(std::int64_t t0, std::int64_t t1, double rate_hz, F&& fn) {
  const double span_s = static_cast<double>(t1 - t0) * 1e-9;
  // The last tick lands at or after t1 so the capture covers the window.
  const auto n = static_cast<std::int64_t>(std::ceil(span_s * rate_hz - 1e-6));
  for (std::int64_t k = 0; k <= n; ++k) fn(t0 + std::llround(static_cast<double>(k) * 1e9 / rate_hz));
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1) + salt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

powertrace::PowerTrace sim_power_trace(const SimProfile& profile, std::span<const Event> events,
                                       const SampleWindow& window) {
  const PowerModel model(profile, events);
  GaussianNoise noise(mix(profile.seed, window.stream, 1));
  std::vector<powertrace::MonsoonSample> samples;
  for_each_tick(window.host_t0_ns, window.host_t1_ns, profile.sample_rate_hz, [&](std::int64_t host_ns) {
    const double p = model.at(host_ns + window.device_offset_ns) + noise.next(profile.noise_std_mw);
    samples.push_back({static_cast<double>(host_ns - window.host_t0_ns) * 1e-9, p / profile.voltage_v,
                       profile.voltage_v});
  });
  return powertrace::PowerTrace::electrical(std::move(samples), powertrace::TraceSource::Sim);
}

powertrace::PowerTrace sim_power_trace(const SimProfile& profile, std::span<const Event> events) {
  return sim_power_trace(profile, events, default_window(profile, events));
}

powertrace::TempTrace sim_temperature_trace(const SimProfile& profile, std::span<const Event> events,
                                            const SampleWindow& window) {
  const PowerModel model(profile, events);
  GaussianNoise noise(mix(profile.seed, window.stream, 2));
  powertrace::TempTrace trace;
  trace.source = powertrace::TraceSource::Sim;
  const double dt = 1.0 / profile.temp_sample_rate_hz;
  const double decay = std::exp(-dt / profile.thermal_tau_s);
  auto target = [&](std::int64_t host_ns) {
    return profile.ambient_c + profile.thermal_gain_c_per_w * model.at(host_ns + window.device_offset_ns) / 1000.0;
  };
  std::optional<double> temp;
  std::int64_t prev_ns = window.host_t0_ns;
  for_each_tick(window.host_t0_ns, window.host_t1_ns, profile.temp_sample_rate_hz, [&](std::int64_t host_ns) {
    if (!temp) temp = target(host_ns);
    else {
      const double goal = target(prev_ns);
      temp = goal + (*temp - goal) * decay;
    }
    prev_ns = host_ns;
    const double reading =
        std::clamp(*temp + noise.next(profile.temp_noise_std_c), powertrace::kMinTempC, powertrace::kMaxTempC);
    trace.samples.push_back({static_cast<double>(host_ns - window.host_t0_ns) * 1e-9, profile.temp_sensor, reading});
  });
  return trace;
}

powertrace::TempTrace sim_temperature_trace(const SimProfile& profile, std::span<const Event> events) {
  return sim_temperature_trace(profile, events, default_window(profile, events));
}

}  // namespace melt::agent
