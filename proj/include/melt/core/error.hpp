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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace melt {

enum class Errc {
  LengthMismatch,
  InvalidArgument,
  NotFound,
  DigestMismatch,
  MalformedConfig,
  MalformedRow,
  NonMonotonicTimestamp,
  EmptyTrace,
  WindowOutOfRange,
  TooFewSamples,
  DegenerateWindow,
  MalformedTrace,
  NonPositiveInput,
  SeriesTooShort,
  EmptyGroup,
  AgentUnreachable,
  ClockUnstable,
  Timeout,
  AgentCrash,
  AgentOom,
  SimFault,
  UnknownRunId,
  DuplicateRunId,
  PowerTimeout,
  MonitorBusy,
  IoError,
};

std::string_view to_string(Errc code);
/// Inverse of to_string; nullopt for unknown names.
std::optional<Errc> errc_from_string(std::string_view name);

/// Thrown by every melt module. `line()` is set for parse errors and is
/// 1-based, counting the header line.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
};

}  // namespace melt
