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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "melt/core/clock.hpp"

namespace melt::orchestrator {

struct MarkWindow {
  std::int64_t start_ns = 0;
  std::optional<std::int64_t> stop_ns;
};

/// Host-timestamped start/stop marks keyed by run id. Append-only; safe to
/// share between the listener thread and the runner.
class NotificationLog {
 public:
  explicit NotificationLog(Clock& clock) : clock_(clock) {}

  /// DuplicateRunId if the run already started.
  std::int64_t start(const std::string& run_id);
  /// UnknownRunId without a prior start, DuplicateRunId on a second stop.
  std::int64_t stop(const std::string& run_id);

  std::optional<MarkWindow> window(const std::string& run_id) const;

 private:
  Clock& clock_;
  mutable std::mutex mu_;
  std::map<std::string, MarkWindow> marks_;
};

/// What the benchmark app calls when an evaluation task starts/completes.
class Notifier {
 public:
  virtual ~Notifier() = default;
  virtual void start(const std::string& run_id) = 0;
  virtual void stop(const std::string& run_id) = 0;
};

class LocalNotifier final : public Notifier {
 public:
  explicit LocalNotifier(NotificationLog& log) : log_(log) {}
  void start(const std::string& run_id) override { log_.start(run_id); }
  void stop(const std::string& run_id) override { log_.stop(run_id); }

 private:
  NotificationLog& log_;
};

/// POST /start and POST /stop with body {"run_id": "..."}. 200 on accept,
/// 404 for UnknownRunId, 409 for DuplicateRunId, 400 for a bad body.
/// Port 0 binds an ephemeral port.
class NotificationServer {
 public:
  NotificationServer(NotificationLog& log, const std::string& host = "127.0.0.1", int port = 0);
  ~NotificationServer();
  NotificationServer(const NotificationServer&) = delete;
  NotificationServer& operator=(const NotificationServer&) = delete;

  int port() const { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
};

/// Client side of the listener. Maps 404/409 back to UnknownRunId and
/// DuplicateRunId; connection failures to IoError.
class HttpNotifier final : public Notifier {
 public:
  HttpNotifier(std::string host, int port) : host_(std::move(host)), port_(port) {}
  void start(const std::string& run_id) override { post("/start", run_id); }
  void stop(const std::string& run_id) override { post("/stop", run_id); }

 private:
  void post(const std::string& path, const std::string& run_id);
  std::string host_;
  int port_;
};

}  // namespace melt::orchestrator
