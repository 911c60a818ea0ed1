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

#include <atomic>
#include <cmath>
#include <optional>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "melt/core/error.hpp"
#include "melt/powertrace/trace.hpp"

namespace melt::test {

inline std::filesystem::path source_dir() { return MELT_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "melt") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

/// Electrical trace at a fixed voltage sampled from power(t) in mW.
inline powertrace::PowerTrace sampled_trace(const std::function<double(double)>& power, double span_s, double rate_hz,
                                            double voltage = 3.8) {
  const auto n = static_cast<std::size_t>(std::llround(span_s * rate_hz)) + 1;
  std::vector<powertrace::MonsoonSample> s;
  s.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    s.push_back({t, power(t) / voltage, voltage});
  }
  return powertrace::PowerTrace::electrical(std::move(s), powertrace::TraceSource::Sim);
}

inline powertrace::PowerTrace constant_trace(double mw, double span_s, double rate_hz = 5000, double voltage = 3.8) {
  return sampled_trace([mw](double) { return mw; }, span_s, rate_hz, voltage);
}

/// Runs f and returns the Errc it threw; fails the check when nothing
/// (or something other than melt::Error) escapes.
template <class F>
std::optional<Errc> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

template <class F>
std::optional<std::size_t> error_line(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.line();
  }
  return std::nullopt;
}

}  // namespace melt::test
