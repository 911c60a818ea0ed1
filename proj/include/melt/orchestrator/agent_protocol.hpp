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

#include <string>
#include <string_view>

#include <json.hpp>

#include "melt/core/error.hpp"
#include "melt/orchestrator/device_agent.hpp"

// JSON bodies of the agent wire protocol. Every endpoint takes a POST with
// a JSON object and answers 200 with a JSON object, or an error status
// with {"error": <Errc name>, "message": ...}.
//   /power   {"action": "on"|"off"|"query"}
//            -> {"responsive", "supports_power_control", "device"}
//   /clock   {"host_ts_ns"} -> {"device_ts_ns"}
//   /push    {"path", "data_b64"} -> {"ok"}
//   /launch  {"action": "open", "run_id", "backend", "model", "output_dir"}
//            | {"action": "interrupt"} -> {"ok"}
//   /prompt  PromptRequest -> {"generated_tokens"}
//   /collect {"prefix"} -> {"files": {path: base64}}
//            | {"monitor": {"t0_ns", "t1_ns", "rate_hz"}}
//            -> {"power_format": "monsoon"|"sysfs", "power_csv", "temperature_csv"?}
namespace melt::orchestrator::protocol {

using nlohmann::json;

std::string base64_encode(std::string_view bytes);
/// Throws MalformedConfig on invalid input.
std::string base64_decode(std::string_view text);

json to_json(const PromptRequest& r);
PromptRequest prompt_request_from_json(const json& j);
json to_json(const LaunchRequest& r);
LaunchRequest launch_request_from_json(const json& j);

json capture_to_json(const Capture& c);
Capture capture_from_json(const json& j);

json error_body(const Error& e);
/// HTTP status used for an error code.
int error_status(Errc code);
/// Rebuilds the Error carried by an error body; IoError when unreadable.
Error error_from_body(int status, const std::string& body);

}  // namespace melt::orchestrator::protocol
