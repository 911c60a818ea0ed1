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
#include <cstdint>

namespace melt {

/// Host timebase. All host timestamps are nanoseconds from this clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ns() = 0;
  virtual void sleep_for_ns(std::int64_t ns) = 0;

  void sleep_until_ns(std::int64_t deadline_ns) {
    const auto now = now_ns();
    if (deadline_ns > now) sleep_for_ns(deadline_ns - now);
  }
};

/// Wall clock (system_clock) so that host timestamps are comparable across
/// processes on the same machine.
class SystemClock final : public Clock {
 public:
  std::int64_t now_ns() override;
  void sleep_for_ns(std::int64_t ns) override;
};

/// Discrete clock that only moves when someone sleeps on it.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t origin_ns = kDefaultOrigin) : now_(origin_ns) {}

  std::int64_t now_ns() override { return now_.load(); }
  void sleep_for_ns(std::int64_t ns) override {
    if (ns > 0) now_.fetch_add(ns);
  }

  static constexpr std::int64_t kDefaultOrigin = 1'700'000'000'000'000'000;

 private:
  std::atomic<std::int64_t> now_;
};

constexpr std::int64_t seconds_to_ns(double s) { return static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5)); }
constexpr double ns_to_seconds(std::int64_t ns) { return static_cast<double>(ns) * 1e-9; }

}  // namespace melt
