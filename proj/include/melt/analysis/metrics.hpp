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

#include <cstdint>
#include <optional>
#include <vector>

#include "melt/analysis/align.hpp"
#include "melt/analysis/integrate.hpp"
#include "melt/powertrace/baseline.hpp"

namespace melt::analysis {

struct PromptMetrics {
  std::int64_t prompt_index = 0;
  std::int64_t conversation_index = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t generated_tokens = 0;
  double prefill_s = 0;
  double decode_s = 0;  // prefill end -> last decode_token
  double prefill_tps = 0;
  double generation_tps = 0;
  EnergyWindow prefill_energy;
  EnergyWindow decode_energy;
  // Decode-window charge and energy divided by generated tokens.
  std::optional<double> discharge_mah_per_token;
  std::optional<double> discharge_mah_per_token_gross;
  double energy_mwh_per_token = 0;
  double energy_mwh_per_token_gross = 0;
  std::optional<double> load_time_s;  // first prompt only
  std::optional<double> max_temp_c;

  bool operator==(const PromptMetrics&) const = default;
};

/// One entry per prompt in index order. Energy windows are skipped (left
/// zero) only when the power trace is empty. Throws MalformedTrace for
/// unbalanced or incomplete prompt events.
std::vector<PromptMetrics> prompt_metrics(const AlignedTimeline& timeline,
                                          const std::optional<powertrace::BaselinePower>& baseline = std::nullopt);

/// capacity / per-prompt discharge, fractional. Throws NonPositiveInput.
double battery_projection(double capacity_mah, double per_prompt_discharge_mah);

}  // namespace melt::analysis
