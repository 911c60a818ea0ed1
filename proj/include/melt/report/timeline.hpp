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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melt/analysis/align.hpp"

namespace melt::report {

struct PhaseSpan {
  std::string phase;  // load, prefill, decode
  std::optional<std::int64_t> prompt_index;
  double t0 = 0;  // trace seconds, [t0, t1)
  double t1 = 0;
};

/// Load, prefill and decode spans of a timeline in trace seconds.
std::vector<PhaseSpan> phase_spans(const analysis::AlignedTimeline& timeline);

struct TimelineRow {
  double ts_s = 0;
  double power_mw_raw = 0;  // gross
  double power_mw_smoothed = 0;
  std::string phase;  // load, prefill, decode or idle
  std::optional<std::int64_t> prompt_index;
};

std::vector<TimelineRow> timeline_rows(const analysis::AlignedTimeline& timeline, std::size_t smoothing_n);

/// ts_s,power_mw_raw,power_mw_smoothed,phase,prompt_index
std::string timeline_csv(const std::vector<TimelineRow>& rows);

}  // namespace melt::report
