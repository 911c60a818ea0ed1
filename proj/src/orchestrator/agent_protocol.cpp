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

#include "melt/orchestrator/agent_protocol.hpp"

#include <openssl/evp.h>

#include "melt/core/json_io.hpp"
#include "melt/powertrace/csv.hpp"

namespace melt::orchestrator::protocol {

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(Errc::MalformedConfig, "base64 length is not a multiple of 4");
  if (text.empty()) return {};
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw Error(Errc::MalformedConfig, "invalid base64");
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

json to_json(const PromptRequest& r) {
  json j{{"run_id", r.run_id},
         {"conversation_index", r.conversation_index},
         {"prompt_index", r.prompt_index},
         {"prompt_tokens", r.prompt_tokens},
         {"max_gen_length", r.max_gen_length},
         {"context_size", r.context_size},
         {"micro", r.micro},
         {"first_in_conversation", r.first_in_conversation},
         {"last_in_conversation", r.last_in_conversation},
         {"deadline_ns", r.deadline_ns}};
  if (r.gen_tokens) j["gen_tokens"] = *r.gen_tokens;
  return j;
}

PromptRequest prompt_request_from_json(const json& j) {
  core::check_keys(j,
                   {"run_id", "conversation_index", "prompt_index", "prompt_tokens", "gen_tokens", "max_gen_length",
                    "context_size", "micro", "first_in_conversation", "last_in_conversation", "deadline_ns"},
                   "prompt request");
  PromptRequest r;
  r.run_id = j.at("run_id").get<std::string>();
  r.conversation_index = j.at("conversation_index").get<std::int64_t>();
  r.prompt_index = j.at("prompt_index").get<std::int64_t>();
  r.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  if (j.contains("gen_tokens")) r.gen_tokens = j["gen_tokens"].get<std::int64_t>();
  r.max_gen_length = j.at("max_gen_length").get<std::int64_t>();
  r.context_size = j.at("context_size").get<std::int64_t>();
  r.micro = j.at("micro").get<bool>();
  r.first_in_conversation = j.at("first_in_conversation").get<bool>();
  r.last_in_conversation = j.at("last_in_conversation").get<bool>();
  r.deadline_ns = j.at("deadline_ns").get<std::int64_t>();
  return r;
}

json to_json(const LaunchRequest& r) {
  return json{{"action", "open"},
              {"run_id", r.run_id},
              {"backend", core::to_string(r.backend)},
              {"model", r.model},
              {"output_dir", r.output_dir}};
}

LaunchRequest launch_request_from_json(const json& j) {
  core::check_keys(j, {"action", "run_id", "backend", "model", "output_dir"}, "launch request");
  return LaunchRequest{j.at("run_id").get<std::string>(),
                       core::parse_enum<core::Backend>(j.at("backend").get<std::string>()),
                       j.at("model").get<std::string>(), j.at("output_dir").get<std::string>()};
}

json capture_to_json(const Capture& c) {
  json j;
  if (c.power.is_electrical()) {
    j["power_format"] = "monsoon";
    j["power_csv"] = powertrace::serialize_monsoon(c.power);
  } else {
    j["power_format"] = "sysfs";
    j["power_csv"] = powertrace::serialize_sysfs(c.power);
  }
  if (c.temperature && !c.temperature->empty())
    j["temperature_csv"] = powertrace::serialize_temperature(*c.temperature);
  return j;
}

Capture capture_from_json(const json& j) {
  Capture c;
  const auto format = j.at("power_format").get<std::string>();
  const auto csv = j.at("power_csv").get<std::string>();
  if (format == "monsoon") c.power = powertrace::parse_monsoon(csv);
  else if (format == "sysfs") c.power = powertrace::parse_sysfs(csv);
  else throw Error(Errc::MalformedConfig, "unknown power format " + format);
  if (j.contains("temperature_csv")) c.temperature = powertrace::parse_temperature(j["temperature_csv"].get<std::string>());
  return c;
}

json error_body(const Error& e) { return json{{"error", to_string(e.code())}, {"message", e.what()}}; }

int error_status(Errc code) {
  switch (code) {
    case Errc::AgentUnreachable: return 503;
    case Errc::Timeout: return 504;
    case Errc::MalformedConfig:
    case Errc::InvalidArgument: return 400;
    case Errc::NotFound:
    case Errc::UnknownRunId: return 404;
    case Errc::DuplicateRunId:
    case Errc::MonitorBusy: return 409;
    default: return 500;
  }
}

Error error_from_body(int status, const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("error") && j["error"].is_string()) {
    if (auto code = errc_from_string(j["error"].get<std::string>())) {
      // The server sends what(), which already carries the code prefix.
      auto message = j.value("message", std::string{});
      const std::string prefix = std::string(to_string(*code)) + ": ";
      if (message.starts_with(prefix)) message.erase(0, prefix.size());
      return Error(*code, message);
    }
  }
  return Error(Errc::IoError, "agent returned HTTP " + std::to_string(status));
}

}  // namespace melt::orchestrator::protocol
