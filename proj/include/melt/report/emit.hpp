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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "melt/report/aggregate.hpp"
#include "melt/report/run_report.hpp"

namespace melt::report {

enum class Format { Csv, Json };
/// "csv" or "json"; InvalidArgument otherwise.
Format parse_format(std::string_view name);

/// Tables use 6 significant digits and sorted keys so equal inputs give
/// equal bytes. An empty table renders as the header (csv) or no rows.
std::string render(const AggregateTable& table, Format format);
/// Json: the lossless report. Csv: its prompt metrics table.
std::string render(const RunReport& report, Format format);
std::string prompt_metrics_csv(std::span<const analysis::PromptMetrics> prompts);

/// Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);
void emit(const AggregateTable& table, Format format, const std::filesystem::path& path);
void emit(const RunReport& report, Format format, const std::filesystem::path& path);

}  // namespace melt::report
