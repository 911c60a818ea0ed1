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

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "melt/agent/event.hpp"

namespace melt::analysis {

struct OpSummary {
  double total_us = 0;
  double share = 0;
  std::size_t count = 0;
  bool operator==(const OpSummary&) const = default;
};

/// Totals op instants (attrs op_name, duration_us) whose `stage` attr
/// equals `stage`; an empty stage selects every op. Shares are fractions
/// of the selected total.
std::map<std::string, OpSummary> per_op_summary(std::span<const agent::Event> events, std::string_view stage = {});

/// Combined share of the ops whose name contains `needle`.
double share_matching(const std::map<std::string, OpSummary>& summary, std::string_view needle);

}  // namespace melt::analysis
