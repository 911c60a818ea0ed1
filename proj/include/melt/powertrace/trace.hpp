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

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace melt::powertrace {

enum class TraceSource { Monsoon, Sysfs, Sim };
enum class RailKind { Cpu, Gpu, Soc, Ddr, Total, Other };

std::string_view to_string(TraceSource s);
std::string_view to_string(RailKind k);
/// Case-insensitive; DRAM is an alias for DDR. Unknown names are Other.
RailKind classify_rail(std::string_view name);

struct MonsoonSample {
  double ts_s = 0;
  double current_ma = 0;
  double voltage_v = 0;

  double power_mw() const { return current_ma * voltage_v; }
  bool operator==(const MonsoonSample&) const = default;
};

struct RailSeries {
  std::string name;
  RailKind kind = RailKind::Other;
  std::vector<double> ts_s;
  std::vector<double> power_mw;
  bool synthesized = false;

  bool operator==(const RailSeries&) const = default;
};

struct TraceMeta {
  std::string device_id;
  std::string run_id;
  bool operator==(const TraceMeta&) const = default;
};

/// Sampled electrical timeseries in host seconds. Electrical traces
/// (monsoon, sim) carry current and voltage per sample; sysfs traces carry
/// per-rail power with a TOTAL rail that is synthesized when absent. The
/// primary channel (V*I, or TOTAL) is what energy integration consumes.
class PowerTrace {
 public:
  PowerTrace() = default;

  /// Throws EmptyTrace, NonMonotonicTimestamp or MalformedRow.
  static PowerTrace electrical(std::vector<MonsoonSample> samples, TraceSource source = TraceSource::Monsoon);
  /// Rails must be individually sorted; a TOTAL rail is added when missing.
  static PowerTrace rails(std::vector<RailSeries> rails);

  TraceSource source() const { return source_; }
  bool is_electrical() const { return source_ != TraceSource::Sysfs; }
  double nominal_rate_hz() const { return nominal_rate_hz_; }

  std::size_t size() const { return primary_ts().size(); }
  bool empty() const { return size() == 0; }
  std::span<const double> times() const { return primary_ts(); }
  double t_first() const { return primary_ts().front(); }
  double t_last() const { return primary_ts().back(); }

  double power_mw(std::size_t i) const;
  /// Electrical traces only.
  double current_ma(std::size_t i) const { return current_ma_[i]; }
  double voltage_v(std::size_t i) const { return voltage_v_[i]; }

  std::vector<MonsoonSample> samples() const;
  const std::vector<RailSeries>& rail_series() const { return rails_; }
  const RailSeries* rail(std::string_view name) const;
  const RailSeries& total_rail() const;

  /// Baseline removed by subtract_baseline, 0 for a gross trace.
  double applied_baseline_mw() const { return applied_baseline_mw_; }

  TraceMeta meta;
  std::vector<std::string> warnings;

  bool operator==(const PowerTrace&) const = default;

 private:
  friend PowerTrace resample(const PowerTrace&, double);
  friend struct BaselineAccess;

  std::span<const double> primary_ts() const;

  TraceSource source_ = TraceSource::Monsoon;
  std::vector<double> ts_;
  std::vector<double> current_ma_;
  std::vector<double> voltage_v_;
  std::vector<RailSeries> rails_;
  std::size_t total_index_ = 0;
  double nominal_rate_hz_ = 0;
  double applied_baseline_mw_ = 0;
};

/// (n - 1) / (t_last - t_first); 0 for fewer than two samples.
double estimate_rate_hz(std::span<const double> ts);

struct JitterReport {
  double observed_rate_hz = 0;
  std::size_t intervals = 0;
  std::size_t out_of_band = 0;  // spacing outside +-50% of nominal
};
JitterReport check_jitter(std::span<const double> ts, double expected_rate_hz);

/// Trapezoidal integral of the piecewise-linear interpolant through
/// (ts[i], value(i)) over [t0, t1], interpolating at both edges. Callers
/// guarantee ts.size() >= 2 and ts.front() <= t0 <= t1 <= ts.back().
template <class ValueAt>
double integrate_linear(std::span<const double> ts, ValueAt&& value, double t0, double t1) {
  const std::size_t n = ts.size();
  auto segment = [&](double t) -> std::size_t {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    return std::min(k, n - 2);
  };
  auto interp = [&](std::size_t k, double t) {
    const double a = ts[k], b = ts[k + 1];
    const double va = value(k), vb = value(k + 1);
    return va + (vb - va) * ((t - a) / (b - a));
  };
  const std::size_t i = segment(t0);
  const std::size_t j = segment(t1);
  if (i == j) return 0.5 * (interp(i, t0) + interp(i, t1)) * (t1 - t0);
  double sum = 0.5 * (interp(i, t0) + value(i + 1)) * (ts[i + 1] - t0);
  for (std::size_t k = i + 1; k < j; ++k) sum += 0.5 * (value(k) + value(k + 1)) * (ts[k + 1] - ts[k]);
  sum += 0.5 * (value(j) + interp(j, t1)) * (t1 - ts[j]);
  return sum;
}

/// Temperature samples; ts non-decreasing per sensor. sensors() lists names
/// in order of first appearance.
struct TempSample {
  double ts_s = 0;
  std::string sensor;
  double temp_c = 0;
  bool operator==(const TempSample&) const = default;
};

struct TempTrace {
  std::vector<TempSample> samples;
  TraceSource source = TraceSource::Sim;

  std::vector<std::string> sensors() const;
  bool empty() const { return samples.empty(); }
  bool operator==(const TempTrace&) const = default;
};

inline constexpr double kMinTempC = -40.0;
inline constexpr double kMaxTempC = 150.0;

}  // namespace melt::powertrace
