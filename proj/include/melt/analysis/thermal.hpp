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
#include <string>

#include "melt/powertrace/trace.hpp"

namespace melt::analysis {

struct SensorSummary {
  double max_c = 0;
  double mean_c = 0;
  std::size_t count = 0;
  bool operator==(const SensorSummary&) const = default;
};

struct ThermalSummary {
  double max_c = 0;
  double mean_c = 0;  // over all samples in the window
  std::map<std::string, SensorSummary> sensors;
  bool operator==(const ThermalSummary&) const = default;
};

/// Sample max/mean inside [t0, t1]. Throws WindowOutOfRange when the
/// window holds no samples, DegenerateWindow when t0 > t1.
ThermalSummary thermal_summary(const powertrace::TempTrace& trace, double t0, double t1);

}  // namespace melt::analysis
