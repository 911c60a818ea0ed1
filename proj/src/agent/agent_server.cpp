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

#include "melt/agent/agent_server.hpp"

#include <functional>

#include <httplib.h>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"
#include "melt/orchestrator/agent_protocol.hpp"

namespace melt::agent {

using nlohmann::json;
namespace orch = orchestrator;
namespace proto = orchestrator::protocol;

struct AgentServer::Impl {
  httplib::Server server;
};

namespace {

using Handler = std::function<json(const json&)>;

httplib::Server::Handler wrap(Handler fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    json out;
    try {
      const auto body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) throw Error(Errc::MalformedConfig, "request body must be a JSON object");
      out = fn(body);
      res.status = 200;
    } catch (const Error& e) {
      out = proto::error_body(e);
      res.status = proto::error_status(e.code());
    } catch (const json::exception& e) {
      out = proto::error_body(Error(Errc::MalformedConfig, e.what()));
      res.status = 400;
    }
    res.set_content(out.dump(), "application/json");
  };
}

}  // namespace

AgentServer::AgentServer(orch::DeviceAgent& agent, orch::CaptureBackend& monitor, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  auto& s = impl_->server;
  s.Post("/power", wrap([&agent](const json& j) {
    core::check_keys(j, {"action"}, "power request");
    const auto action = j.at("action").get<std::string>();
    if (action == "on") agent.power(orch::PowerAction::On);
    else if (action == "off") agent.power(orch::PowerAction::Off);
    else if (action != "query") throw Error(Errc::InvalidArgument, "unknown power action " + action);
    return json{{"responsive", agent.responsive()},
                {"supports_power_control", agent.supports_power_control()},
                {"device", agent.device()}};
  }));
  s.Post("/clock", wrap([&agent](const json& j) {
    core::check_keys(j, {"host_ts_ns"}, "clock probe");
    return json{{"device_ts_ns", agent.clock_probe(j.at("host_ts_ns").get<std::int64_t>())}};
  }));
  s.Post("/push", wrap([&agent](const json& j) {
    core::check_keys(j, {"path", "data_b64"}, "push request");
    agent.push(j.at("path").get<std::string>(), proto::base64_decode(j.at("data_b64").get<std::string>()));
    return json{{"ok", true}};
  }));
  s.Post("/launch", wrap([&agent](const json& j) {
    const auto action = j.value("action", std::string{});
    if (action == "open") agent.launch(proto::launch_request_from_json(j));
    else if (action == "interrupt") agent.interrupt();
    else throw Error(Errc::InvalidArgument, "unknown launch action " + action);
    return json{{"ok", true}};
  }));
  s.Post("/prompt", wrap([&agent](const json& j) {
    return json{{"generated_tokens", agent.prompt(proto::prompt_request_from_json(j)).generated_tokens}};
  }));
  s.Post("/collect", wrap([&agent, &monitor](const json& j) {
    if (j.contains("monitor")) {
      core::check_keys(j, {"monitor"}, "collect request");
      const auto& m = j["monitor"];
      core::check_keys(m, {"t0_ns", "t1_ns", "rate_hz"}, "monitor window");
      return proto::capture_to_json(
          monitor.capture(m.at("t0_ns").get<std::int64_t>(), m.at("t1_ns").get<std::int64_t>(), m.at("rate_hz").get<double>()));
    }
    core::check_keys(j, {"prefix"}, "collect request");
    json files = json::object();
    for (const auto& [path, bytes] : agent.collect(j.at("prefix").get<std::string>()))
      files[path] = proto::base64_encode(bytes);
    return json{{"files", std::move(files)}};
  }));

  if (port == 0) port_ = s.bind_to_any_port(host);
  else port_ = s.bind_to_port(host, port) ? port : -1;
  if (port_ <= 0) throw Error(Errc::IoError, "cannot bind agent server on " + host + ":" + std::to_string(port));
}

AgentServer::~AgentServer() { stop(); }

void AgentServer::start() {
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void AgentServer::serve() { impl_->server.listen_after_bind(); }

void AgentServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace melt::agent
