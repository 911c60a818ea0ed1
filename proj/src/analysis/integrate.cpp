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

#include "melt/analysis/integrate.hpp"

#include <cmath>

#include "melt/core/error.hpp"

namespace melt::analysis {

EnergyWindow integrate(const powertrace::PowerTrace& trace, double t0, double t1,
                       const std::optional<powertrace::BaselinePower>& baseline) {
  if (!(t0 < t1)) throw Error(Errc::DegenerateWindow, "window start must precede its end");
  if (trace.size() < 2) throw Error(Errc::EmptyTrace, "integration needs at least two samples");
  if (t0 < trace.t_first() - kWindowSlackS || t1 > trace.t_last() + kWindowSlackS)
    throw Error(Errc::WindowOutOfRange, "window lies outside the trace span");
  t0 = std::max(t0, trace.t_first());
  t1 = std::min(t1, trace.t_last());
  if (!(t0 < t1)) throw Error(Errc::DegenerateWindow, "window collapses after clamping to the trace");

  const double applied = trace.applied_baseline_mw();
  const double removed = baseline ? baseline->mean_power_mw : applied;
  const auto ts = trace.times();
  const double span = t1 - t0;

  EnergyWindow w;
  w.t0 = t0;
  w.t1 = t1;
  const double measured = powertrace::integrate_linear(ts, [&](std::size_t i) { return trace.power_mw(i); }, t0, t1);
  w.energy_mwh_gross = (measured + applied * span) / 3600.0;
  w.energy_mwh_net = (measured + (applied - removed) * span) / 3600.0;

  if (trace.is_electrical()) {
    const double gross = powertrace::integrate_linear(
        ts, [&](std::size_t i) { return trace.current_ma(i) + applied / trace.voltage_v(i); }, t0, t1);
    const double removed_charge =
        powertrace::integrate_linear(ts, [&](std::size_t i) { return removed / trace.voltage_v(i); }, t0, t1);
    w.charge_mah_gross = gross / 3600.0;
    w.charge_mah_net = (gross - removed_charge) / 3600.0;
  }
  w.negative_net_flag = w.energy_mwh_net < 0;
  return w;
}

}  // namespace melt::analysis
