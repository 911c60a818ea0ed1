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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "melt/agent/event.hpp"
#include "support.hpp"

using namespace melt;
using namespace melt::agent;
using melt::test::error_line;
using melt::test::error_of;

namespace {

Event ev(std::int64_t ts, EventKind k, EventPhase p, std::map<std::string, AttrValue> attrs = {}) {
  return Event{ts, k, p, std::move(attrs)};
}

}  // namespace

TEST_CASE("jsonl: exact field set and round trip") {
  std::vector<Event> events = {
      ev(1, EventKind::ModelLoad, EventPhase::Begin),
      ev(2, EventKind::ModelLoad, EventPhase::End),
      ev(3, EventKind::Prefill, EventPhase::Begin, {{"prompt_index", std::int64_t{0}}, {"tokens", std::int64_t{32}}}),
      ev(4, EventKind::Op, EventPhase::Instant,
         {{"op_name", std::string("dequantize_matmul")}, {"duration_us", 97.5}, {"stage", std::string("prefill")}}),
      ev(5, EventKind::Prefill, EventPhase::End, {{"prompt_index", std::int64_t{0}}}),
      ev(9'223'372'036'854'775'000, EventKind::DecodeToken, EventPhase::Instant,
         {{"prompt_index", std::int64_t{0}}, {"token_index", std::int64_t{0}}}),
  };
  const auto text = write_jsonl(events);
  CHECK(read_jsonl(text) == events);
  CHECK(to_json_line(events[0]) == R"({"ts_ns":1,"kind":"model_load","phase":"begin","attrs":{}})");
  CHECK(events[3].number_attr("duration_us") == 97.5);
  CHECK(events[3].string_attr("op_name") == "dequantize_matmul");
  CHECK(events[2].int_attr("tokens") == 32);
  CHECK_FALSE(events[2].int_attr("missing").has_value());
}

TEST_CASE("jsonl: malformed lines report their line number") {
  const std::string good = R"({"ts_ns":1,"kind":"idle","phase":"instant","attrs":{}})";
  CHECK(error_line([&] { read_jsonl(good + "\n" + "{not json}\n"); }) == 2u);
  CHECK(error_of([&] { read_jsonl(R"({"ts_ns":1,"kind":"idle","phase":"instant","attrs":{},"x":1})"); }) ==
        Errc::MalformedTrace);
  CHECK(error_of([&] { read_jsonl(R"({"ts_ns":1.5,"kind":"idle","phase":"instant","attrs":{}})"); }) ==
        Errc::MalformedTrace);
  CHECK(error_of([&] { read_jsonl(R"({"ts_ns":1,"kind":"gpu","phase":"instant","attrs":{}})"); }) ==
        Errc::MalformedTrace);
  CHECK(error_of([&] { read_jsonl(R"({"ts_ns":1,"kind":"idle","phase":"instant","attrs":{"a":[1]}})"); }) ==
        Errc::MalformedTrace);
  CHECK(read_jsonl("").empty());
  CHECK(read_jsonl(good + "\n\n").size() == 1);
}

TEST_CASE("well-formed: nesting, ordering and token indices") {
  using K = EventKind;
  using P = EventPhase;
  const std::vector<Event> ok = {
      ev(0, K::Conversation, P::Begin),
      ev(1, K::Prefill, P::Begin),
      ev(2, K::Prefill, P::End),
      ev(3, K::DecodeToken, P::Instant, {{"prompt_index", std::int64_t{0}}, {"token_index", std::int64_t{0}}}),
      ev(4, K::DecodeToken, P::Instant, {{"prompt_index", std::int64_t{0}}, {"token_index", std::int64_t{1}}}),
      ev(5, K::Conversation, P::End),
  };
  CHECK_NOTHROW(check_well_formed(ok));

  auto unterminated = ok;
  unterminated.pop_back();
  CHECK(error_of([&] { check_well_formed(unterminated); }) == Errc::MalformedTrace);

  auto crossed = ok;
  std::swap(crossed[2].kind, crossed[5].kind);
  CHECK(error_of([&] { check_well_formed(crossed); }) == Errc::MalformedTrace);

  auto backwards = ok;
  backwards[3].ts_ns = 10;
  CHECK(error_of([&] { check_well_formed(backwards); }) == Errc::MalformedTrace);

  auto repeated = ok;
  repeated[4].attrs["token_index"] = std::int64_t{0};
  CHECK(error_of([&] { check_well_formed(repeated); }) == Errc::MalformedTrace);

  auto ranged = ok;
  ranged[3].phase = P::Begin;
  CHECK(error_of([&] { check_well_formed(ranged); }) == Errc::MalformedTrace);

  const std::vector<Event> stray_end = {ev(0, K::Prefill, P::End)};
  CHECK(error_of([&] { check_well_formed(stray_end); }) == Errc::MalformedTrace);
}
