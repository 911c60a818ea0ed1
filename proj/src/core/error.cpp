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

#include "melt/core/error.hpp"

namespace melt {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotFound: return "NotFound";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::MalformedConfig: return "MalformedConfig";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::WindowOutOfRange: return "WindowOutOfRange";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::AgentUnreachable: return "AgentUnreachable";
    case Errc::ClockUnstable: return "ClockUnstable";
    case Errc::Timeout: return "Timeout";
    case Errc::AgentCrash: return "AgentCrash";
    case Errc::AgentOom: return "AgentOom";
    case Errc::SimFault: return "SimFault";
    case Errc::UnknownRunId: return "UnknownRunId";
    case Errc::DuplicateRunId: return "DuplicateRunId";
    case Errc::PowerTimeout: return "PowerTimeout";
    case Errc::MonitorBusy: return "MonitorBusy";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::optional<Errc> errc_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Errc::IoError); ++i) {
    const auto code = static_cast<Errc>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

namespace {

std::string decorate(Errc code, const std::string& message, std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " at line " + std::to_string(*line);
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace melt
