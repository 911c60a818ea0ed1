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

#include "melt/orchestrator/http_agent_client.hpp"

#include <httplib.h>

#include "melt/core/error.hpp"
#include "melt/core/json_io.hpp"
#include "melt/orchestrator/agent_protocol.hpp"

namespace melt::orchestrator {

using nlohmann::json;
namespace proto = protocol;

struct HttpAgentClient::Impl {
  Impl(const std::string& url, Clock& c) : client(url), clock(c) {
    if (!client.is_valid()) throw Error(Errc::InvalidArgument, "bad agent url " + url);
    client.set_connection_timeout(2);
    client.set_read_timeout(30);
  }

  json call(const std::string& path, const json& body, std::optional<std::int64_t> read_timeout_s = std::nullopt) {
    std::lock_guard lock(mu);
    client.set_read_timeout(read_timeout_s.value_or(30));
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw Error(Errc::AgentUnreachable, path + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw proto::error_from_body(res->status, res->body);
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::IoError, path + ": agent sent invalid JSON");
    return j;
  }

  json power(const std::string& action) { return call("/power", json{{"action", action}}); }

  std::mutex mu;
  httplib::Client client;
  Clock& clock;
};

HttpAgentClient::HttpAgentClient(const std::string& url, Clock& clock) : impl_(std::make_unique<Impl>(url, clock)) {}
HttpAgentClient::~HttpAgentClient() = default;

core::DeviceDescriptor HttpAgentClient::device() {
  return impl_->power("query").at("device").get<core::DeviceDescriptor>();
}

bool HttpAgentClient::supports_power_control() { return impl_->power("query").at("supports_power_control").get<bool>(); }

void HttpAgentClient::power(PowerAction action) { impl_->power(action == PowerAction::On ? "on" : "off"); }

bool HttpAgentClient::responsive() {
  try {
    return impl_->power("query").at("responsive").get<bool>();
  } catch (const Error& e) {
    if (e.code() == Errc::AgentUnreachable) return false;
    throw;
  }
}

std::int64_t HttpAgentClient::clock_probe(std::int64_t host_ts_ns) {
  return impl_->call("/clock", json{{"host_ts_ns", host_ts_ns}}).at("device_ts_ns").get<std::int64_t>();
}

void HttpAgentClient::push(const std::string& path, const std::string& data) {
  impl_->call("/push", json{{"path", path}, {"data_b64", proto::base64_encode(data)}});
}

void HttpAgentClient::launch(const LaunchRequest& request) { impl_->call("/launch", proto::to_json(request), 600); }

void HttpAgentClient::interrupt() { impl_->call("/launch", json{{"action", "interrupt"}}); }

PromptResult HttpAgentClient::prompt(const PromptRequest& request) {
  constexpr std::int64_t kGraceS = 10;
  const std::int64_t left_s = (request.deadline_ns - impl_->clock.now_ns()) / 1'000'000'000;
  json j;
  try {
    j = impl_->call("/prompt", proto::to_json(request), std::max<std::int64_t>(left_s, 0) + kGraceS);
  } catch (const Error& e) {
    // A read that outlives the deadline is a stalled app, not a lost device.
    if (e.code() == Errc::AgentUnreachable && impl_->clock.now_ns() >= request.deadline_ns)
      throw Error(Errc::Timeout, e.what());
    throw;
  }
  return PromptResult{j.at("generated_tokens").get<std::int64_t>()};
}

FileMap HttpAgentClient::collect(const std::string& prefix) {
  const auto reply = impl_->call("/collect", json{{"prefix", prefix}});
  FileMap out;
  for (const auto& [path, b64] : reply.at("files").items()) out[path] = proto::base64_decode(b64.get<std::string>());
  return out;
}

Capture HttpAgentClient::capture(std::int64_t t0, std::int64_t t1, double rate_hz) {
  const auto j = impl_->call("/collect", json{{"monitor", {{"t0_ns", t0}, {"t1_ns", t1}, {"rate_hz", rate_hz}}}}, 120);
  try {
    return proto::capture_from_json(j);
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("bad capture payload: ") + e.what());
  }
}

}  // namespace melt::orchestrator
