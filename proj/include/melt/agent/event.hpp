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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace melt::agent {

enum class EventKind { ModelLoad, Conversation, Prefill, DecodeToken, Op, Idle };
enum class EventPhase { Begin, End, Instant };

std::string_view to_string(EventKind k);
std::string_view to_string(EventPhase p);

using AttrValue = std::variant<std::int64_t, double, std::string>;

/// One device-side trace event. Well-known attrs: prompt_index,
/// conversation_index, token_index, tokens (prefill begin), op_name, stage,
/// duration_us.
struct Event {
  std::int64_t ts_ns = 0;
  EventKind kind = EventKind::Idle;
  EventPhase phase = EventPhase::Instant;
  std::map<std::string, AttrValue> attrs;

  std::optional<std::int64_t> int_attr(std::string_view key) const;
  std::optional<double> number_attr(std::string_view key) const;
  std::optional<std::string> string_attr(std::string_view key) const;

  bool operator==(const Event&) const = default;
};

/// JSON-lines codec: exactly the fields ts_ns, kind, phase, attrs per line.
std::string to_json_line(const Event& e);
std::string write_jsonl(std::span<const Event> events);
/// Throws Error(MalformedTrace) with the 1-based line number.
std::vector<Event> read_jsonl(std::string_view text);

/// Throws Error(MalformedTrace) unless timestamps are non-decreasing,
/// begin/end pairs nest properly, decode_token events are instants and
/// token_index strictly increases within each prompt.
void check_well_formed(std::span<const Event> events);

}  // namespace melt::agent
