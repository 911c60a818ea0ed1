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

#include "melt/analysis/ops.hpp"

namespace melt::analysis {

std::map<std::string, OpSummary> per_op_summary(std::span<const agent::Event> events, std::string_view stage) {
  std::map<std::string, OpSummary> out;
  double total = 0;
  for (const auto& e : events) {
    if (e.kind != agent::EventKind::Op) continue;
    const auto name = e.string_attr("op_name");
    const auto dur = e.number_attr("duration_us");
    if (!name || !dur) continue;
    if (!stage.empty() && e.string_attr("stage").value_or("") != stage) continue;
    auto& s = out[*name];
    s.total_us += *dur;
    ++s.count;
    total += *dur;
  }
  for (auto& [_, s] : out) s.share = total > 0 ? s.total_us / total : 0;
  return out;
}

double share_matching(const std::map<std::string, OpSummary>& summary, std::string_view needle) {
  double share = 0;
  for (const auto& [name, s] : summary)
    if (name.find(needle) != std::string::npos) share += s.share;
  return share;
}

}  // namespace melt::analysis
