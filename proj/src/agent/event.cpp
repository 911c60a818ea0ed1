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

#include "melt/agent/event.hpp"

#include <array>
#include <utility>

#include <json.hpp>
#include "melt/core/error.hpp"

namespace melt::agent {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 6> kKinds{{{EventKind::ModelLoad, "model_load"},
                                                                        {EventKind::Conversation, "conversation"},
                                                                        {EventKind::Prefill, "prefill"},
                                                                        {EventKind::DecodeToken, "decode_token"},
                                                                        {EventKind::Op, "op"},
                                                                        {EventKind::Idle, "idle"}}};
constexpr std::array<std::pair<EventPhase, std::string_view>, 3> kPhases{
    {{EventPhase::Begin, "begin"}, {EventPhase::End, "end"}, {EventPhase::Instant, "instant"}}};

template <class Table, class E>
std::optional<E> reverse(const Table& table, std::string_view name) {
  for (const auto& [k, n] : table)
    if (n == name) return k;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

std::string_view to_string(EventPhase p) {
  for (const auto& [phase, name] : kPhases)
    if (phase == p) return name;
  return "?";
}

std::optional<std::int64_t> Event::int_attr(std::string_view key) const {
  auto it = attrs.find(std::string(key));
  if (it == attrs.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  return std::nullopt;
}

std::optional<double> Event::number_attr(std::string_view key) const {
  auto it = attrs.find(std::string(key));
  if (it == attrs.end()) return std::nullopt;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
  return std::nullopt;
}

std::optional<std::string> Event::string_attr(std::string_view key) const {
  auto it = attrs.find(std::string(key));
  if (it == attrs.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  return std::nullopt;
}

std::string to_json_line(const Event& e) {
  nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
  for (const auto& [key, value] : e.attrs) std::visit([&](const auto& v) { attrs[key] = v; }, value);
  nlohmann::ordered_json j;
  j["ts_ns"] = e.ts_ns;
  j["kind"] = to_string(e.kind);
  j["phase"] = to_string(e.phase);
  j["attrs"] = std::move(attrs);
  return j.dump();
}

std::string write_jsonl(std::span<const Event> events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json_line(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> read_jsonl(std::string_view text) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto fail = [&](const std::string& why) -> Error { return Error(Errc::MalformedTrace, why, line_no); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw fail(ex.what());
    }
    if (!j.is_object() || j.size() != 4 || !j.contains("ts_ns") || !j.contains("kind") || !j.contains("phase") ||
        !j.contains("attrs"))
      throw fail("event must have exactly ts_ns, kind, phase, attrs");
    Event e;
    if (!j["ts_ns"].is_number_integer()) throw fail("ts_ns must be an integer");
    e.ts_ns = j["ts_ns"].get<std::int64_t>();
    if (!j["kind"].is_string() || !j["phase"].is_string()) throw fail("kind and phase must be strings");
    auto kind = reverse<decltype(kKinds), EventKind>(kKinds, j["kind"].get<std::string>());
    auto phase = reverse<decltype(kPhases), EventPhase>(kPhases, j["phase"].get<std::string>());
    if (!kind || !phase) throw fail("unknown kind or phase");
    e.kind = *kind;
    e.phase = *phase;
    if (!j["attrs"].is_object()) throw fail("attrs must be an object");
    for (const auto& [key, v] : j["attrs"].items()) {
      if (v.is_number_integer()) e.attrs[key] = v.get<std::int64_t>();
      else if (v.is_number_float()) e.attrs[key] = v.get<double>();
      else if (v.is_string()) e.attrs[key] = v.get<std::string>();
      else throw fail("attr '" + key + "' must be a number or string");
    }
    events.push_back(std::move(e));
  }
  return events;
}

void check_well_formed(std::span<const Event> events) {
  std::vector<EventKind> open;
  std::map<std::int64_t, std::int64_t> last_token;  // prompt_index -> token_index
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    auto fail = [&](const std::string& why) {
      return Error(Errc::MalformedTrace, "event " + std::to_string(i) + ": " + why);
    };
    if (i > 0 && e.ts_ns < events[i - 1].ts_ns) throw fail("timestamp decreases");
    switch (e.phase) {
      case EventPhase::Begin:
        if (e.kind == EventKind::DecodeToken) throw fail("decode_token must be an instant");
        open.push_back(e.kind);
        break;
      case EventPhase::End:
        if (open.empty() || open.back() != e.kind)
          throw fail(std::string("unmatched end of ") + std::string(to_string(e.kind)));
        open.pop_back();
        break;
      case EventPhase::Instant:
        if (e.kind == EventKind::DecodeToken) {
          const auto prompt = e.int_attr("prompt_index").value_or(-1);
          const auto token = e.int_attr("token_index");
          if (!token) throw fail("decode_token without token_index");
          auto [it, fresh] = last_token.try_emplace(prompt, *token);
          if (!fresh) {
            if (*token <= it->second) throw fail("token_index not increasing");
            it->second = *token;
          }
        }
        break;
    }
  }
  if (!open.empty()) throw Error(Errc::MalformedTrace, std::string("unterminated ") + std::string(to_string(open.back())));
}

}  // namespace melt::agent
