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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "melt/analysis/align.hpp"
#include "melt/analysis/degradation.hpp"
#include "melt/analysis/integrate.hpp"
#include "melt/analysis/metrics.hpp"
#include "melt/analysis/ops.hpp"
#include "melt/analysis/thermal.hpp"
#include "melt/core/types.hpp"
#include "melt/powertrace/baseline.hpp"

namespace melt::analysis {
void to_json(nlohmann::json& j, const EnergyWindow& w);
void from_json(const nlohmann::json& j, EnergyWindow& w);
void to_json(nlohmann::json& j, const PromptMetrics& m);
void from_json(const nlohmann::json& j, PromptMetrics& m);
void to_json(nlohmann::json& j, const DegradationReport& d);
void from_json(const nlohmann::json& j, DegradationReport& d);
void to_json(nlohmann::json& j, const SensorSummary& s);
void from_json(const nlohmann::json& j, SensorSummary& s);
void to_json(nlohmann::json& j, const ThermalSummary& t);
void from_json(const nlohmann::json& j, ThermalSummary& t);
void to_json(nlohmann::json& j, const OpSummary& o);
void from_json(const nlohmann::json& j, OpSummary& o);
}  // namespace melt::analysis

namespace melt::powertrace {
void to_json(nlohmann::json& j, const BaselinePower& b);
void from_json(const nlohmann::json& j, BaselinePower& b);
}  // namespace melt::powertrace

namespace melt::report {

/// Everything derived from one run directory.
struct RunReport {
  core::RunManifest manifest;
  std::vector<analysis::PromptMetrics> prompts;
  // Between the start/stop marks, or idle lead to trace end without marks.
  std::optional<analysis::EnergyWindow> run_energy;
  std::optional<powertrace::BaselinePower> baseline;
  std::optional<analysis::DegradationReport> degradation;
  std::optional<analysis::ThermalSummary> thermal;
  // stage -> op -> summary, for runs that traced ops.
  std::map<std::string, std::map<std::string, analysis::OpSummary>> ops;
  bool partial = false;
  bool negative_net = false;
  std::vector<std::string> notes;

  bool operator==(const RunReport&) const = default;
};

struct AnalyzeOptions {
  // Trace seconds; defaults to the idle lead [0, idle_lead_s].
  std::optional<std::pair<double, double>> baseline_window;
  std::size_t degradation_window = analysis::kDefaultDegradationWindow;
  double drop_fraction = analysis::kDefaultDropFraction;
};

/// Failed runs are analyzed as far as their artifacts allow; problems are
/// recorded in notes instead of thrown. Throws for malformed traces of
/// successful runs and for an explicit baseline window that cannot be used.
RunReport analyze_run(const analysis::AlignedTimeline& timeline, const AnalyzeOptions& options = {});

// Lossless JSON: doubles are written at round-trip precision.
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

}  // namespace melt::report
