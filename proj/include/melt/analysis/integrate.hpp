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

#include <optional>

#include "melt/powertrace/baseline.hpp"
#include "melt/powertrace/trace.hpp"

namespace melt::analysis {

struct EnergyWindow {
  double t0 = 0;
  double t1 = 0;
  double energy_mwh_gross = 0;
  double energy_mwh_net = 0;
  // Absent for traces without current (sysfs rails).
  std::optional<double> charge_mah_gross;
  std::optional<double> charge_mah_net;
  bool negative_net_flag = false;

  double duration_s() const { return t1 - t0; }
  bool operator==(const EnergyWindow&) const = default;
};

/// Edges closer than this to the trace span are clamped onto it.
inline constexpr double kWindowSlackS = 1e-9;

/// Trapezoidal energy (mWh = integral of mW over s / 3600) and charge
/// (mAh) over [t0, t1] in trace seconds, interpolating at both edges.
/// Gross values add back any baseline already removed from `trace`; net
/// values remove `baseline` when given, else whatever was already removed.
/// Throws DegenerateWindow (t0 >= t1), WindowOutOfRange, EmptyTrace.
EnergyWindow integrate(const powertrace::PowerTrace& trace, double t0, double t1,
                       const std::optional<powertrace::BaselinePower>& baseline = std::nullopt);

}  // namespace melt::analysis
