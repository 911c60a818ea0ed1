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

#include "melt/powertrace/trace.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "melt/core/error.hpp"

namespace melt::powertrace {

std::string_view to_string(TraceSource s) {
  switch (s) {
    case TraceSource::Monsoon: return "monsoon";
    case TraceSource::Sysfs: return "sysfs";
    case TraceSource::Sim: return "sim";
  }
  return "?";
}

std::string_view to_string(RailKind k) {
  switch (k) {
    case RailKind::Cpu: return "CPU";
    case RailKind::Gpu: return "GPU";
    case RailKind::Soc: return "SOC";
    case RailKind::Ddr: return "DDR";
    case RailKind::Total: return "TOTAL";
    case RailKind::Other: return "other";
  }
  return "?";
}

RailKind classify_rail(std::string_view name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "CPU") return RailKind::Cpu;
  if (up == "GPU") return RailKind::Gpu;
  if (up == "SOC") return RailKind::Soc;
  if (up == "DDR" || up == "DRAM") return RailKind::Ddr;
  if (up == "TOTAL") return RailKind::Total;
  return RailKind::Other;
}

double estimate_rate_hz(std::span<const double> ts) {
  if (ts.size() < 2 || !(ts.back() > ts.front())) return 0;
  return static_cast<double>(ts.size() - 1) / (ts.back() - ts.front());
}

JitterReport check_jitter(std::span<const double> ts, double expected_rate_hz) {
  JitterReport r;
  r.observed_rate_hz = estimate_rate_hz(ts);
  if (ts.size() < 2 || !(expected_rate_hz > 0)) return r;
  const double period = 1.0 / expected_rate_hz;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double dt = ts[i] - ts[i - 1];
    ++r.intervals;
    if (dt < 0.5 * period || dt > 1.5 * period) ++r.out_of_band;
  }
  return r;
}

PowerTrace PowerTrace::electrical(std::vector<MonsoonSample> samples, TraceSource source) {
  if (samples.empty()) throw Error(Errc::EmptyTrace, "no samples");
  PowerTrace t;
  t.source_ = source;
  t.ts_.reserve(samples.size());
  t.current_ma_.reserve(samples.size());
  t.voltage_v_.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.ts_s) || !std::isfinite(s.current_ma) || !std::isfinite(s.voltage_v))
      throw Error(Errc::MalformedRow, "non-finite sample " + std::to_string(i));
    if (i > 0 && !(s.ts_s > samples[i - 1].ts_s))
      throw Error(Errc::NonMonotonicTimestamp, "sample " + std::to_string(i));
    t.ts_.push_back(s.ts_s);
    t.current_ma_.push_back(s.current_ma);
    t.voltage_v_.push_back(s.voltage_v);
  }
  t.nominal_rate_hz_ = estimate_rate_hz(t.ts_);
  return t;
}

namespace {

// Sums every non-TOTAL rail at the timestamps of the densest rail, taking
// each rail's nearest sample within one nominal period. Grid points where
// some rail has no such sample are skipped.
RailSeries synthesize_total(const std::vector<RailSeries>& rails) {
  std::size_t ref = 0;
  for (std::size_t i = 1; i < rails.size(); ++i)
    if (rails[i].ts_s.size() > rails[ref].ts_s.size()) ref = i;
  const double rate = estimate_rate_hz(rails[ref].ts_s);
  const double tol = rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity();

  RailSeries total;
  total.name = "TOTAL";
  total.kind = RailKind::Total;
  total.synthesized = true;
  for (double t : rails[ref].ts_s) {
    double sum = 0;
    bool complete = true;
    for (const auto& r : rails) {
      const auto& ts = r.ts_s;
      auto it = std::lower_bound(ts.begin(), ts.end(), t);
      std::size_t best = ts.size();
      double best_d = std::numeric_limits<double>::infinity();
      if (it != ts.end()) {
        best = static_cast<std::size_t>(it - ts.begin());
        best_d = *it - t;
      }
      if (it != ts.begin() && t - *(it - 1) < best_d) {
        best = static_cast<std::size_t>(it - ts.begin()) - 1;
        best_d = t - *(it - 1);
      }
      if (best == ts.size() || best_d > tol) {
        complete = false;
        break;
      }
      sum += r.power_mw[best];
    }
    if (complete) {
      total.ts_s.push_back(t);
      total.power_mw.push_back(sum);
    }
  }
  return total;
}

}  // namespace

PowerTrace PowerTrace::rails(std::vector<RailSeries> rails) {
  if (rails.empty()) throw Error(Errc::EmptyTrace, "no rails");
  PowerTrace t;
  t.source_ = TraceSource::Sysfs;
  std::optional<std::size_t> total;
  for (std::size_t r = 0; r < rails.size(); ++r) {
    auto& rail = rails[r];
    if (rail.ts_s.empty() || rail.ts_s.size() != rail.power_mw.size())
      throw Error(Errc::EmptyTrace, "rail " + rail.name + " has no samples");
    rail.kind = classify_rail(rail.name);
    for (std::size_t i = 1; i < rail.ts_s.size(); ++i)
      if (!(rail.ts_s[i] > rail.ts_s[i - 1]))
        throw Error(Errc::NonMonotonicTimestamp, "rail " + rail.name + " sample " + std::to_string(i));
    if (rail.kind == RailKind::Total) total = r;
    if (rail.kind == RailKind::Other) t.warnings.push_back("UnknownRail: " + rail.name + " kept as other");
  }
  t.rails_ = std::move(rails);
  if (!total) {
    auto synth = synthesize_total(t.rails_);
    if (synth.ts_s.empty()) throw Error(Errc::EmptyTrace, "rails never align to form TOTAL");
    t.rails_.push_back(std::move(synth));
    total = t.rails_.size() - 1;
  }
  t.total_index_ = *total;
  t.nominal_rate_hz_ = estimate_rate_hz(t.rails_[t.total_index_].ts_s);
  return t;
}

std::span<const double> PowerTrace::primary_ts() const {
  if (is_electrical()) return ts_;
  if (rails_.empty()) return {};
  return rails_[total_index_].ts_s;
}

double PowerTrace::power_mw(std::size_t i) const {
  if (is_electrical()) return current_ma_[i] * voltage_v_[i];
  return rails_[total_index_].power_mw[i];
}

std::vector<MonsoonSample> PowerTrace::samples() const {
  std::vector<MonsoonSample> out;
  out.reserve(ts_.size());
  for (std::size_t i = 0; i < ts_.size(); ++i) out.push_back({ts_[i], current_ma_[i], voltage_v_[i]});
  return out;
}

const RailSeries* PowerTrace::rail(std::string_view name) const {
  for (const auto& r : rails_)
    if (r.name == name) return &r;
  return nullptr;
}

const RailSeries& PowerTrace::total_rail() const {
  if (rails_.empty()) throw Error(Errc::InvalidArgument, "trace has no rails");
  return rails_[total_index_];
}

std::vector<std::string> TempTrace::sensors() const {
  std::vector<std::string> out;
  for (const auto& s : samples)
    if (std::find(out.begin(), out.end(), s.sensor) == out.end()) out.push_back(s.sensor);
  return out;
}

}  // namespace melt::powertrace
