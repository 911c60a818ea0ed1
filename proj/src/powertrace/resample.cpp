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

#include "melt/powertrace/resample.hpp"

#include <cmath>

#include "melt/core/error.hpp"

namespace melt::powertrace {

namespace {

std::vector<double> uniform_grid(double t0, double t1, double hz) {
  const double span = t1 - t0;
  const auto n = std::max<long long>(1, std::llround(span * hz));
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = t0 + span * (static_cast<double>(k) / n);
  grid.back() = t1;
  return grid;
}

std::vector<double> interpolate(std::span<const double> ts, std::span<const double> v, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  std::size_t k = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    while (k + 2 < ts.size() && ts[k + 1] <= t) ++k;
    const double a = ts[k], b = ts[k + 1];
    if (t == b) out[g] = v[k + 1];
    else if (t == a) out[g] = v[k];
    else out[g] = v[k] + (v[k + 1] - v[k]) * ((t - a) / (b - a));
  }
  return out;
}

}  // namespace

PowerTrace resample(const PowerTrace& trace, double target_hz) {
  if (!(target_hz > 0) || !std::isfinite(target_hz))
    throw Error(Errc::InvalidArgument, "target_hz must be positive");
  if (trace.empty()) throw Error(Errc::EmptyTrace, "cannot resample an empty trace");

  PowerTrace out = trace;
  if (trace.is_electrical()) {
    if (trace.size() < 2) return out;
    auto grid = uniform_grid(trace.t_first(), trace.t_last(), target_hz);
    out.current_ma_ = interpolate(trace.ts_, trace.current_ma_, grid);
    out.voltage_v_ = interpolate(trace.ts_, trace.voltage_v_, grid);
    out.ts_ = std::move(grid);
    out.nominal_rate_hz_ = estimate_rate_hz(out.ts_);
    return out;
  }
  for (auto& rail : out.rails_) {
    if (rail.ts_s.size() < 2) continue;
    auto grid = uniform_grid(rail.ts_s.front(), rail.ts_s.back(), target_hz);
    rail.power_mw = interpolate(rail.ts_s, rail.power_mw, grid);
    rail.ts_s = std::move(grid);
  }
  out.nominal_rate_hz_ = estimate_rate_hz(out.rails_[out.total_index_].ts_s);
  return out;
}

}  // namespace melt::powertrace
