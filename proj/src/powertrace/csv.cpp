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

#include "melt/powertrace/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>

#include "melt/core/error.hpp"
#include "melt/core/format.hpp"

namespace melt::powertrace {

namespace {

// Walks LF-terminated lines, tolerating CR and a missing final newline.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    while (pos_ < text_.size()) {
      auto nl = text_.find('\n', pos_);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view line = text_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      return line;
    }
    return std::nullopt;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::array<std::string_view, 3> split3(std::string_view line, std::size_t line_no) {
  std::array<std::string_view, 3> out{};
  std::size_t start = 0;
  for (std::size_t f = 0; f < 3; ++f) {
    auto comma = line.find(',', start);
    if (f < 2 && comma == std::string_view::npos)
      throw Error(Errc::MalformedRow, "expected 3 fields", line_no);
    if (f == 2) {
      if (comma != std::string_view::npos) throw Error(Errc::MalformedRow, "expected 3 fields", line_no);
      comma = line.size();
    }
    out[f] = line.substr(start, comma - start);
    start = comma + 1;
  }
  return out;
}

double number(std::string_view field, std::size_t line_no, const char* what) {
  auto v = core::parse_double(field);
  if (!v || !std::isfinite(*v)) throw Error(Errc::MalformedRow, std::string("bad ") + what, line_no);
  return *v;
}

void expect_header(LineReader& in, std::string_view header) {
  auto line = in.next();
  if (!line) throw Error(Errc::EmptyTrace, "missing header");
  if (*line != header)
    throw Error(Errc::MalformedRow, "expected header '" + std::string(header) + "'", in.line_no());
}

}  // namespace

PowerTrace parse_monsoon(std::string_view bytes) {
  LineReader in(bytes);
  expect_header(in, kMonsoonHeader);
  std::vector<MonsoonSample> samples;
  while (auto line = in.next()) {
    const auto ln = in.line_no();
    auto f = split3(*line, ln);
    MonsoonSample s{number(f[0], ln, "ts_s"), number(f[1], ln, "current_mA"), number(f[2], ln, "voltage_V")};
    if (!(s.voltage_v > 0)) throw Error(Errc::MalformedRow, "voltage must be positive", ln);
    if (!samples.empty() && !(s.ts_s > samples.back().ts_s))
      throw Error(Errc::NonMonotonicTimestamp, "ts_s " + std::string(f[0]) + " does not increase", ln);
    samples.push_back(s);
  }
  if (samples.empty()) throw Error(Errc::EmptyTrace, "no data rows");
  return PowerTrace::electrical(std::move(samples), TraceSource::Monsoon);
}

PowerTrace parse_sysfs(std::string_view bytes) {
  LineReader in(bytes);
  expect_header(in, kSysfsHeader);
  std::vector<RailSeries> rails;
  std::map<std::string, std::size_t, std::less<>> index;
  while (auto line = in.next()) {
    const auto ln = in.line_no();
    auto f = split3(*line, ln);
    const double ts = number(f[0], ln, "ts_s");
    if (f[1].empty()) throw Error(Errc::MalformedRow, "empty rail", ln);
    const double p = number(f[2], ln, "power_mW");
    if (p < 0) throw Error(Errc::MalformedRow, "negative power", ln);
    auto it = index.find(f[1]);
    if (it == index.end()) {
      it = index.emplace(std::string(f[1]), rails.size()).first;
      rails.push_back(RailSeries{std::string(f[1]), classify_rail(f[1]), {}, {}, false});
    }
    auto& rail = rails[it->second];
    if (!rail.ts_s.empty() && !(ts > rail.ts_s.back()))
      throw Error(Errc::NonMonotonicTimestamp, "rail " + rail.name + " ts_s does not increase", ln);
    rail.ts_s.push_back(ts);
    rail.power_mw.push_back(p);
  }
  if (rails.empty()) throw Error(Errc::EmptyTrace, "no data rows");
  std::sort(rails.begin(), rails.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return PowerTrace::rails(std::move(rails));
}

TempTrace parse_temperature(std::string_view bytes) {
  LineReader in(bytes);
  expect_header(in, kTemperatureHeader);
  TempTrace trace;
  std::map<std::string, double, std::less<>> last;
  while (auto line = in.next()) {
    const auto ln = in.line_no();
    auto f = split3(*line, ln);
    TempSample s{number(f[0], ln, "ts_s"), std::string(f[1]), number(f[2], ln, "temp_C")};
    if (s.sensor.empty()) throw Error(Errc::MalformedRow, "empty sensor", ln);
    if (s.temp_c < kMinTempC || s.temp_c > kMaxTempC)
      throw Error(Errc::MalformedRow, "temperature outside sanity band", ln);
    auto it = last.find(s.sensor);
    if (it != last.end() && s.ts_s < it->second)
      throw Error(Errc::NonMonotonicTimestamp, "sensor " + s.sensor + " ts_s decreases", ln);
    last[s.sensor] = s.ts_s;
    trace.samples.push_back(std::move(s));
  }
  if (trace.samples.empty()) throw Error(Errc::EmptyTrace, "no data rows");
  return trace;
}

std::string serialize_monsoon(const PowerTrace& trace) {
  if (!trace.is_electrical()) throw Error(Errc::InvalidArgument, "not an electrical trace");
  std::string out(kMonsoonHeader);
  out += '\n';
  out.reserve(out.size() + trace.size() * 28);
  const auto ts = trace.times();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += core::format_shortest(ts[i]);
    out += ',';
    out += core::format_shortest(trace.current_ma(i));
    out += ',';
    out += core::format_shortest(trace.voltage_v(i));
    out += '\n';
  }
  return out;
}

std::string serialize_sysfs(const PowerTrace& trace) {
  if (trace.is_electrical()) throw Error(Errc::InvalidArgument, "not a rail trace");
  std::vector<const RailSeries*> rails;
  for (const auto& r : trace.rail_series())
    if (!r.synthesized) rails.push_back(&r);
  std::string out(kSysfsHeader);
  out += '\n';
  // k-way merge by (ts, rail order) so first appearances keep rail order.
  std::vector<std::size_t> cursor(rails.size(), 0);
  while (true) {
    std::size_t pick = rails.size();
    for (std::size_t r = 0; r < rails.size(); ++r) {
      if (cursor[r] >= rails[r]->ts_s.size()) continue;
      if (pick == rails.size() || rails[r]->ts_s[cursor[r]] < rails[pick]->ts_s[cursor[pick]]) pick = r;
    }
    if (pick == rails.size()) break;
    const auto i = cursor[pick]++;
    out += core::format_shortest(rails[pick]->ts_s[i]);
    out += ',';
    out += rails[pick]->name;
    out += ',';
    out += core::format_shortest(rails[pick]->power_mw[i]);
    out += '\n';
  }
  return out;
}

std::string serialize_temperature(const TempTrace& trace) {
  std::string out(kTemperatureHeader);
  out += '\n';
  for (const auto& s : trace.samples) {
    out += core::format_shortest(s.ts_s);
    out += ',';
    out += s.sensor;
    out += ',';
    out += core::format_shortest(s.temp_c);
    out += '\n';
  }
  return out;
}

}  // namespace melt::powertrace
