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

#include "melt/analysis/thermal.hpp"

#include <algorithm>

#include "melt/core/error.hpp"

namespace melt::analysis {

ThermalSummary thermal_summary(const powertrace::TempTrace& trace, double t0, double t1) {
  if (t0 > t1) throw Error(Errc::DegenerateWindow, "window start after its end");
  ThermalSummary out;
  std::map<std::string, double> sums;
  double total = 0;
  std::size_t count = 0;
  for (const auto& s : trace.samples) {
    if (s.ts_s < t0 || s.ts_s > t1) continue;
    auto& sensor = out.sensors[s.sensor];
    sensor.max_c = sensor.count ? std::max(sensor.max_c, s.temp_c) : s.temp_c;
    ++sensor.count;
    sums[s.sensor] += s.temp_c;
    out.max_c = count ? std::max(out.max_c, s.temp_c) : s.temp_c;
    total += s.temp_c;
    ++count;
  }
  if (count == 0) throw Error(Errc::WindowOutOfRange, "no temperature samples inside the window");
  for (auto& [name, sensor] : out.sensors) sensor.mean_c = sums[name] / static_cast<double>(sensor.count);
  out.mean_c = total / static_cast<double>(count);
  return out;
}

}  // namespace melt::analysis
