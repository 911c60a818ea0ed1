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

#include "melt/powertrace/baseline.hpp"

#include <cmath>

#include "melt/core/error.hpp"

namespace melt::powertrace {

struct BaselineAccess {
  static void subtract(PowerTrace& t, double mw) {
    if (t.is_electrical()) {
      for (std::size_t i = 0; i < t.ts_.size(); ++i) t.current_ma_[i] -= mw / t.voltage_v_[i];
    } else {
      for (auto& p : t.rails_[t.total_index_].power_mw) p -= mw;
    }
    t.applied_baseline_mw_ += mw;
  }
};

BaselinePower estimate_baseline(const PowerTrace& trace, double t0, double t1) {
  if (trace.empty()) throw Error(Errc::EmptyTrace, "baseline of empty trace");
  if (!(t0 < t1)) throw Error(Errc::WindowOutOfRange, "baseline window is empty");
  const double c0 = std::max(t0, trace.t_first());
  const double c1 = std::min(t1, trace.t_last());
  if (!(c0 < c1)) throw Error(Errc::WindowOutOfRange, "baseline window does not overlap the trace");

  const auto ts = trace.times();
  const auto lo = std::lower_bound(ts.begin(), ts.end(), c0);
  const auto hi = std::upper_bound(ts.begin(), ts.end(), c1);
  const auto count = static_cast<std::size_t>(hi - lo);
  if (count < kMinBaselineSamples)
    throw Error(Errc::TooFewSamples, std::to_string(count) + " samples in baseline window");

  const double integral = integrate_linear(ts, [&](std::size_t i) { return trace.power_mw(i); }, c0, c1);
  return {integral / (c1 - c0), c0, c1, count};
}

PowerTrace subtract_baseline(const PowerTrace& trace, const BaselinePower& baseline) {
  if (!std::isfinite(baseline.mean_power_mw)) throw Error(Errc::InvalidArgument, "baseline is not finite");
  PowerTrace net = trace;
  BaselineAccess::subtract(net, baseline.mean_power_mw);
  return net;
}

}  // namespace melt::powertrace
