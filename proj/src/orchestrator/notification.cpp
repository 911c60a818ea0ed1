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

#include "melt/orchestrator/notification.hpp"

#include <httplib.h>
#include <json.hpp>

#include "melt/core/error.hpp"

namespace melt::orchestrator {

using nlohmann::json;

std::int64_t NotificationLog::start(const std::string& run_id) {
  std::lock_guard lock(mu_);
  if (marks_.count(run_id)) throw Error(Errc::DuplicateRunId, "run " + run_id + " already started");
  const auto t = clock_.now_ns();
  marks_[run_id] = MarkWindow{t, std::nullopt};
  return t;
}

std::int64_t NotificationLog::stop(const std::string& run_id) {
  std::lock_guard lock(mu_);
  auto it = marks_.find(run_id);
  if (it == marks_.end()) throw Error(Errc::UnknownRunId, "stop for unknown run " + run_id);
  if (it->second.stop_ns) throw Error(Errc::DuplicateRunId, "run " + run_id + " already stopped");
  const auto t = clock_.now_ns();
  it->second.stop_ns = t;
  return t;
}

std::optional<MarkWindow> NotificationLog::window(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = marks_.find(run_id);
  if (it == marks_.end()) return std::nullopt;
  return it->second;
}

struct NotificationServer::Impl {
  httplib::Server server;
};

namespace {

std::optional<std::string> run_id_of(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.size() != 1 || !j.contains("run_id") || !j["run_id"].is_string())
    return std::nullopt;
  auto id = j["run_id"].get<std::string>();
  if (id.empty()) return std::nullopt;
  return id;
}

void reply(httplib::Response& res, int status, const std::string& error, const std::string& message) {
  res.status = status;
  json body = status == 200 ? json{{"ok", true}} : json{{"error", error}, {"message", message}};
  res.set_content(body.dump(), "application/json");
}

}  // namespace

NotificationServer::NotificationServer(NotificationLog& log, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  auto handler = [&log](bool is_start) {
    return [&log, is_start](const httplib::Request& req, httplib::Response& res) {
      const auto id = run_id_of(req.body);
      if (!id) return reply(res, 400, "MalformedConfig", "expected {\"run_id\": string}");
      try {
        const auto t = is_start ? log.start(*id) : log.stop(*id);
        res.status = 200;
        res.set_content(json{{"ok", true}, {"ts_ns", t}}.dump(), "application/json");
      } catch (const Error& e) {
        reply(res, e.code() == Errc::UnknownRunId ? 404 : 409, std::string(to_string(e.code())), e.what());
      }
    };
  };
  impl_->server.Post("/start", handler(true));
  impl_->server.Post("/stop", handler(false));
  if (port == 0) port_ = impl_->server.bind_to_any_port(host);
  else port_ = impl_->server.bind_to_port(host, port) ? port : -1;
  if (port_ <= 0) throw Error(Errc::IoError, "cannot bind notification listener on " + host);
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

NotificationServer::~NotificationServer() { stop(); }

void NotificationServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

void HttpNotifier::post(const std::string& path, const std::string& run_id) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(5);
  auto res = client.Post(path, json{{"run_id", run_id}}.dump(), "application/json");
  if (!res) throw Error(Errc::IoError, "notification endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status == 200) return;
  if (res->status == 404) throw Error(Errc::UnknownRunId, run_id);
  if (res->status == 409) throw Error(Errc::DuplicateRunId, run_id);
  throw Error(Errc::IoError, "notification endpoint returned " + std::to_string(res->status));
}

}  // namespace melt::orchestrator
