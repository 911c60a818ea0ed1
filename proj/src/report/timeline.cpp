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

#include "melt/report/timeline.hpp"

#include <algorithm>
#include <map>

#include "melt/analysis/smooth.hpp"
#include "melt/core/format.hpp"

namespace melt::report {

std::vector<PhaseSpan> phase_spans(const analysis::AlignedTimeline& tl) {
  std::vector<PhaseSpan> spans;
  std::optional<double> load_begin;
  std::map<std::int64_t, double> prefill_begin, prefill_end, last_decode;
  for (const auto& e : tl.events) {
    const double t = tl.trace_seconds(e.ts_ns);
    const auto pi = e.int_attr("prompt_index");
    switch (e.kind) {
      case agent::EventKind::ModelLoad:
        if (e.phase == agent::EventPhase::Begin) load_begin = t;
        else if (e.phase == agent::EventPhase::End && load_begin) spans.push_back({"load", std::nullopt, *load_begin, t});
        break;
      case agent::EventKind::Prefill:
        if (!pi) break;
        if (e.phase == agent::EventPhase::Begin) prefill_begin[*pi] = t;
        else if (e.phase == agent::EventPhase::End) prefill_end[*pi] = t;
        break;
      case agent::EventKind::DecodeToken:
        if (pi) last_decode[*pi] = t;
        break;
      default:
        break;
    }
  }
  for (const auto& [pi, end] : prefill_end) {
    if (auto b = prefill_begin.find(pi); b != prefill_begin.end()) spans.push_back({"prefill", pi, b->second, end});
    if (auto d = last_decode.find(pi); d != last_decode.end()) spans.push_back({"decode", pi, end, d->second});
  }
  std::sort(spans.begin(), spans.end(), [](const PhaseSpan& a, const PhaseSpan& b) { return a.t0 < b.t0; });
  return spans;
}

std::vector<TimelineRow> timeline_rows(const analysis::AlignedTimeline& tl, std::size_t smoothing_n) {
  const auto& p = tl.power;
  std::vector<double> raw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) raw[i] = p.power_mw(i) + p.applied_baseline_mw();
  const auto smoothed = analysis::smooth(raw, smoothing_n);
  const auto spans = phase_spans(tl);

  std::vector<TimelineRow> rows;
  rows.reserve(raw.size());
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double t = p.times()[i];
    while (cursor < spans.size() && spans[cursor].t1 <= t) ++cursor;
    TimelineRow row{t, raw[i], smoothed[i], "idle", std::nullopt};
    // Spans are disjoint, so the first one not yet ended is the only candidate.
    for (std::size_t k = cursor; k < spans.size() && spans[k].t0 <= t; ++k) {
      if (t < spans[k].t1) {
        row.phase = spans[k].phase;
        row.prompt_index = spans[k].prompt_index;
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string timeline_csv(const std::vector<TimelineRow>& rows) {
  std::string out = "ts_s,power_mw_raw,power_mw_smoothed,phase,prompt_index\n";
  for (const auto& r : rows) {
    out += core::format_shortest(r.ts_s) + "," + core::format_sig6(r.power_mw_raw) + "," +
           core::format_sig6(r.power_mw_smoothed) + "," + r.phase + "," +
           (r.prompt_index ? std::to_string(*r.prompt_index) : std::string{}) + "\n";
  }
  return out;
}

}  // namespace melt::report
