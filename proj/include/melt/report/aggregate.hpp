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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "melt/report/run_report.hpp"

namespace melt::report {

enum class Level { Run, Prompt };
std::string_view to_string(Level l);

struct AggregateRow {
  std::map<std::string, std::string> keys;
  std::string metric;
  Level level = Level::Run;
  double mean = 0;
  double std = 0;  // sample (n - 1); 0 when n == 1
  std::size_t n = 0;
  std::size_t attrition = 0;  // runs in the group with status != ok

  bool operator==(const AggregateRow&) const = default;
};

struct AggregateTable {
  std::vector<std::string> key_names;
  std::vector<AggregateRow> rows;  // sorted by keys, level, metric
  std::vector<std::string> warnings;

  bool operator==(const AggregateTable&) const = default;
};

/// Groupable manifest fields, in column order.
const std::vector<std::string>& group_key_names();
std::map<std::string, std::string> group_keys_of(const core::RunManifest& m);

struct MeanStd {
  double mean = 0;
  double std = 0;
  std::size_t n = 0;
};
/// Sample statistics; n == 0 yields zeros.
MeanStd mean_std(std::span<const double> values);

/// Run level: one value per successful run (its prompt mean, or the run
/// quantity itself). Prompt level: every prompt of the successful runs.
/// Groups whose runs all failed produce no rows and a warning. Throws
/// EmptyGroup for no reports and InvalidArgument for unknown keys.
AggregateTable aggregate(std::span<const RunReport> reports, const std::vector<std::string>& group_by = {});

}  // namespace melt::report
