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

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "melt/agent/sim_agent.hpp"
#include "melt/core/json_io.hpp"
#include "melt/orchestrator/agent_protocol.hpp"
#include "melt/orchestrator/clock_sync.hpp"
#include "melt/orchestrator/monitor.hpp"
#include "melt/orchestrator/notification.hpp"
#include "melt/orchestrator/queue_file.hpp"
#include "melt/orchestrator/runner.hpp"
#include "support.hpp"

using namespace melt;
using namespace melt::orchestrator;
using melt::agent::FaultKind;
using melt::agent::SimAgent;
using melt::agent::SimProfile;
using melt::test::error_of;

namespace {

SimProfile fast_profile() {
  SimProfile p;
  p.sample_rate_hz = 200;
  p.temp_sample_rate_hz = 2;
  p.probe_rtt_ns = 2'000'000;
  p.probe_jitter_frac = 0.2;
  return p;
}

core::ExperimentSpec spec_for(const std::string& model, double sleep = 5) {
  core::ExperimentSpec s;
  s.model.name = model;
  s.model.family = "llama";
  s.model.param_count = 1.1;
  s.model.bitwidth = 4;
  s.device = agent::default_sim_device();
  s.context_size = 1024;
  s.max_gen_length = 64;
  s.batch_size = 128;
  s.conversations_uri = "convs";
  s.iterations = 3;
  s.sleep_between_s = sleep;
  return s;
}

ConversationSet three_prompts() {
  return {{{{16, 8}, {24, 6}, {32, 4}}}};
}

JobQueue two_by_three() {
  JobQueue q;
  q.device = agent::default_sim_device();
  q.specs = {spec_for("TinyLlama-1.1B-q4"), spec_for("Gemma-2B-q4")};
  q.conversations["convs"] = three_prompts();
  return q;
}

struct Bench {
  explicit Bench(SimProfile p, core::DeviceDescriptor d = agent::default_sim_device())
      : agent(std::move(p), std::move(d), clock), marks(clock), notifier(marks) {}
  QueueResult run(const JobQueue& q, RunnerConfig cfg = {}) {
    return run_queue(q, agent, agent, marks, notifier, clock, cfg);
  }
  VirtualClock clock;
  SimAgent agent;
  NotificationLog marks;
  LocalNotifier notifier;
};

std::vector<std::string> step_names(const QueueResult& r) {
  std::vector<std::string> out;
  for (const auto& e : r.log) out.emplace_back(to_string(e.step));
  return out;
}

struct CountingBackend final : CaptureBackend {
  Capture capture(std::int64_t, std::int64_t, double) override {
    ++calls;
    return {test::constant_trace(100, 0.01, 1000), std::nullopt};
  }
  int calls = 0;
};

}  // namespace

TEST_CASE("clock sync: recovered offset within rtt/2 of the injected truth") {
  for (std::int64_t offset : {-500'000'000LL, 0LL, 123'000'000LL}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto p = fast_profile();
      p.clock_offset_ns = offset;
      p.seed = seed;
      VirtualClock clock;
      SimAgent a(p, agent::default_sim_device(), clock);
      const auto s = sync_clocks(a, clock);
      CHECK(s.rtt_ns <= 2'000'000 * 1.2 + 1);
      CHECK(std::llabs(s.offset_ns - offset) <= s.rtt_ns / 2);
      CHECK(std::llabs(s.offset_ns - offset) <= 1'000'000 * 1.2);
    }
  }
}

TEST_CASE("clock sync: zero offset with no jitter is exact; failure modes") {
  auto p = fast_profile();
  p.probe_jitter_frac = 0;
  VirtualClock clock;
  SimAgent a(p, agent::default_sim_device(), clock);
  const auto s = sync_clocks(a, clock);
  CHECK(s.offset_ns == 0);
  CHECK(s.rtt_ns == 2'000'000);
  CHECK(error_of([&] { sync_clocks(a, clock, {4, 50'000'000}); }) == Errc::InvalidArgument);

  auto slow = fast_profile();
  slow.probe_rtt_ns = 80'000'000;
  SimAgent b(slow, agent::default_sim_device(), clock);
  CHECK(error_of([&] { sync_clocks(b, clock); }) == Errc::ClockUnstable);

  auto gone = fast_profile();
  gone.unreachable = true;
  SimAgent c(gone, agent::default_sim_device(), clock);
  CHECK(error_of([&] { sync_clocks(c, clock); }) == Errc::AgentUnreachable);
}

TEST_CASE("notification log: windows, unknown and duplicate ids, interleaving") {
  VirtualClock clock;
  NotificationLog log(clock);
  log.start("r1");
  clock.sleep_for_ns(10);
  log.start("r2");
  clock.sleep_for_ns(10);
  log.stop("r1");
  clock.sleep_for_ns(10);
  log.stop("r2");
  const auto w1 = log.window("r1"), w2 = log.window("r2");
  REQUIRE(w1);
  REQUIRE(w2);
  CHECK(w1->start_ns < *w1->stop_ns);
  CHECK(w2->start_ns == w1->start_ns + 10);
  CHECK(*w2->stop_ns == *w1->stop_ns + 10);
  CHECK(error_of([&] { log.stop("r3"); }) == Errc::UnknownRunId);
  CHECK(error_of([&] { log.start("r1"); }) == Errc::DuplicateRunId);
  CHECK(error_of([&] { log.stop("r1"); }) == Errc::DuplicateRunId);
  CHECK_FALSE(log.window("r3").has_value());
}

TEST_CASE("notification log: concurrent writers keep independent windows") {
  SystemClock clock;
  NotificationLog log(clock);
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        const auto id = "t" + std::to_string(t) + "-" + std::to_string(i);
        log.start(id);
        log.stop(id);
      }
    });
  for (auto& t : ts) t.join();
  for (int t = 0; t < 8; ++t)
    for (int i = 0; i < 50; ++i) {
      const auto w = log.window("t" + std::to_string(t) + "-" + std::to_string(i));
      REQUIRE(w);
      CHECK(w->start_ns <= *w->stop_ns);
    }
}

TEST_CASE("notification server: HTTP marks and status mapping") {
  SystemClock clock;
  NotificationLog log(clock);
  NotificationServer server(log);
  REQUIRE(server.port() > 0);
  HttpNotifier n("127.0.0.1", server.port());
  n.start("r1");
  n.start("r2");
  n.stop("r1");
  n.stop("r2");
  CHECK(log.window("r1")->start_ns <= *log.window("r1")->stop_ns);
  CHECK(error_of([&] { n.stop("nope"); }) == Errc::UnknownRunId);
  CHECK(error_of([&] { n.start("r1"); }) == Errc::DuplicateRunId);

  httplib::Client raw("127.0.0.1", server.port());
  CHECK(raw.Post("/start", "not json", "application/json")->status == 400);
  CHECK(raw.Post("/start", R"({"run_id": "x", "extra": 1})", "application/json")->status == 400);
  CHECK(raw.Post("/start", R"({"run_id": 5})", "application/json")->status == 400);
  CHECK(raw.Post("/stop", R"({"run_id": "never"})", "application/json")->status == 404);
  CHECK(raw.Post("/start", R"({"run_id": "ok"})", "application/json")->status == 200);
  server.stop();

  HttpNotifier dead("127.0.0.1", server.port());
  CHECK(error_of([&] { dead.start("z"); }) == Errc::IoError);
}

TEST_CASE("monitor: one session at a time, stop is idempotent") {
  VirtualClock clock;
  CountingBackend backend;
  Monitor m(backend, clock);
  CHECK(m.session().state == MonitorState::Idle);
  m.arm("r1", 5000);
  CHECK(error_of([&] { m.arm("r2", 5000); }) == Errc::MonitorBusy);
  const auto t0 = m.start();
  CHECK(m.session().state == MonitorState::Recording);
  CHECK(error_of([&] { m.arm("r2", 5000); }) == Errc::MonitorBusy);
  clock.sleep_for_ns(1000);
  const auto& c1 = m.stop();
  const auto& c2 = m.stop();
  CHECK(&c1 == &c2);
  CHECK(backend.calls == 1);
  CHECK(m.session().state == MonitorState::Stopped);
  CHECK(m.session().start_ns == t0);
  CHECK(m.session().stop_ns == t0 + 1000);
  CHECK_NOTHROW(m.arm("r2", 100));
  CHECK(default_sample_rate(core::PowerSource::Monsoon) == 5000);
  CHECK(default_sample_rate(core::PowerSource::Sysfs) == 100);
}

TEST_CASE("power control: off->on, edge no-op, never boot") {
  VirtualClock clock;
  SimAgent phone(fast_profile(), agent::default_sim_device(), clock);
  power_control(phone, PowerAction::Off, clock);
  CHECK_FALSE(phone.responsive());
  power_control(phone, PowerAction::On, clock);
  CHECK(phone.responsive());

  auto edge_dev = agent::default_sim_device();
  edge_dev.lab = core::Lab::Edge;
  edge_dev.power_source = core::PowerSource::Sysfs;
  edge_dev.battery_capacity_mah.reset();
  SimAgent edge(fast_profile(), edge_dev, clock);
  const auto before = clock.now_ns();
  CHECK_NOTHROW(power_control(edge, PowerAction::On, clock));
  CHECK_NOTHROW(power_control(edge, PowerAction::Off, clock));
  CHECK(edge.responsive());
  CHECK(clock.now_ns() == before);

  auto brick = fast_profile();
  brick.never_boot = true;
  SimAgent dead(brick, agent::default_sim_device(), clock);
  const auto t = clock.now_ns();
  CHECK(error_of([&] { power_control(dead, PowerAction::On, clock, 3); }) == Errc::PowerTimeout);
  CHECK(clock.now_ns() - t == 3'000'000'000);
}

TEST_CASE("run_experiment: three prompts yield three per-prompt reports") {
  VirtualClock clock;
  SimAgent a(fast_profile(), agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  const auto spec = spec_for("m");
  CHECK(run_experiment(spec, "r1", three_prompts(), a, n, clock) == 3);
  const auto files = a.collect(device_run_dir("r1"));
  const auto reports = std::count_if(files.begin(), files.end(), [](const auto& kv) {
    return kv.first.find("/prompt_") != std::string::npos;
  });
  CHECK(reports == 3);
  CHECK(files.count("runs/r1/responses.json") == 1);
  CHECK(files.count("runs/r1/load.jsonl") == 1);
  const auto w = log.window("r1");
  REQUIRE(w);
  REQUIRE(w->stop_ns);
  CHECK(*w->stop_ns > w->start_ns);
}

TEST_CASE("run_experiment: stall times out at the 2 s conversation limit") {
  auto p = fast_profile();
  p.faults = {{FaultKind::Stall, 1, 1}};
  VirtualClock clock;
  SimAgent a(p, agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  auto spec = spec_for("m");
  spec.conversation_timeout_s = 2;
  const ConversationSet tiny{{{{4, 2}, {4, 2}, {4, 2}}}};
  const auto start = clock.now_ns();
  CHECK(error_of([&] { run_experiment(spec, "r1", tiny, a, n, clock); }) == Errc::Timeout);
  CHECK(log.window("r1")->stop_ns.has_value());
  // The conversation clock starts once the model has loaded.
  CHECK(clock.now_ns() - start == seconds_to_ns(p.load_time_s) + 2'000'000'000);
}

TEST_CASE("run_experiment: a conversation that runs too long times out") {
  VirtualClock clock;
  SimAgent a(fast_profile(), agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  auto spec = spec_for("m");
  spec.conversation_timeout_s = 2;
  const ConversationSet long_conv{{{{16, 40}, {16, 40}}}};
  CHECK(error_of([&] { run_experiment(spec, "r1", long_conv, a, n, clock); }) == Errc::Timeout);
}

TEST_CASE("run_experiment: empty conversation set posts start and stop only") {
  VirtualClock clock;
  SimAgent a(fast_profile(), agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  CHECK(run_experiment(spec_for("m"), "r1", {}, a, n, clock) == 0);
  CHECK(log.window("r1")->stop_ns.has_value());
  for (const auto& [path, _] : a.collect("runs/r1")) CHECK(path.find("prompt_") == std::string::npos);
}

TEST_CASE("run_experiment: micro mode decodes exactly 256 tokens per prompt") {
  VirtualClock clock;
  SimAgent a(fast_profile(), agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  auto spec = spec_for("m");
  spec.mode = core::Mode::Micro;
  spec.context_size = 2048;
  spec.max_gen_length = 256;
  run_experiment(spec, "r1", three_prompts(), a, n, clock);
  std::map<std::int64_t, int> tokens;
  std::map<std::int64_t, std::int64_t> prefill_tokens;
  for (const auto& e : a.device_events()) {
    if (e.kind == agent::EventKind::DecodeToken) ++tokens[*e.int_attr("prompt_index")];
    if (e.kind == agent::EventKind::Prefill && e.phase == agent::EventPhase::Begin)
      prefill_tokens[*e.int_attr("prompt_index")] = *e.int_attr("tokens");
  }
  REQUIRE(tokens.size() == 3);
  for (const auto& [_, n] : tokens) CHECK(n == 256);
  for (const auto& [_, n] : prefill_tokens) CHECK(n == 256);
}

TEST_CASE("run_experiment: macro lengths respect max_gen_length and context") {
  VirtualClock clock;
  auto p = fast_profile();
  p.macro_gen_mean = 500;
  SimAgent a(p, agent::default_sim_device(), clock);
  NotificationLog log(clock);
  LocalNotifier n(log);
  auto spec = spec_for("m");
  spec.max_gen_length = 64;
  const ConversationSet macro{{{{16, std::nullopt}, {1000, std::nullopt}}}};
  run_experiment(spec, "r1", macro, a, n, clock);
  const auto responses = nlohmann::json::parse(a.collect("runs/r1").at("runs/r1/responses.json"));
  CHECK(responses[0]["generated_tokens"] == 64);
  CHECK(responses[1]["generated_tokens"] == 24);
}

TEST_CASE("run_queue: 2 specs x 3 iterations follow the algorithm step order") {
  Bench b(fast_profile());
  const auto r = b.run(two_by_three());
  CHECK_FALSE(r.aborted);
  REQUIRE(r.manifests.size() == 6);
  std::vector<std::string> expected = {"power_on", "sync"};
  for (int s = 0; s < 2; ++s) {
    expected.insert(expected.end(), {"push", "apply"});
    for (int i = 0; i < 3; ++i) expected.insert(expected.end(), {"arm", "run", "stop_monitor", "collect", "sleep"});
  }
  CHECK(step_names(r) == expected);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < r.manifests.size(); ++i) {
    const auto& m = r.manifests[i];
    CHECK(m.status == core::RunStatus::Ok);
    CHECK(m.host_start_ns < m.host_end_ns);
    CHECK(m.mark_start_ns.has_value());
    CHECK(*m.mark_start_ns >= m.host_start_ns + seconds_to_ns(m.idle_lead_s));
    CHECK(*m.mark_stop_ns <= m.host_end_ns);
    CHECK(m.iteration == static_cast<int>(i % 3) + 1);
    ids.insert(m.run_id);
    if (i > 0) CHECK(r.manifests[i - 1].host_end_ns < m.host_start_ns);
  }
  CHECK(ids.size() == 6);
  CHECK(r.manifests[0].run_id == "s00_TinyLlama-1.1B-q4_c1024_g64_b128_i1");
  CHECK(r.artifacts[0].files.size() == 5);
}

TEST_CASE("run_queue: injected OOM is isolated to its run") {
  Bench clean(fast_profile());
  const auto base = clean.run(two_by_three());

  auto p = fast_profile();
  p.faults = {{FaultKind::Oom, 2, 1}};
  Bench b(p);
  const auto r = b.run(two_by_three());
  REQUIRE(r.manifests.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.manifests[i].status == (i == 1 ? core::RunStatus::Oom : core::RunStatus::Ok));
    CHECK(r.manifests[i].spec == base.manifests[i].spec);
    CHECK(r.manifests[i].run_id == base.manifests[i].run_id);
  }
  CHECK(step_names(r) == step_names(base));
  CHECK(r.log[10].step == Step::Run);
  CHECK(r.log[10].detail == "oom");
}

TEST_CASE("run_queue: crash maps to device_error, stall to timeout") {
  auto p = fast_profile();
  p.faults = {{FaultKind::Crash, 1, 0}, {FaultKind::Stall, 3, 2}, {FaultKind::Oom, 5, -1}};
  Bench b(p);
  auto q = two_by_three();
  for (auto& s : q.specs) s.conversation_timeout_s = 30;
  const auto r = b.run(q);
  REQUIRE(r.manifests.size() == 6);
  CHECK(r.manifests[0].status == core::RunStatus::DeviceError);
  CHECK(r.manifests[2].status == core::RunStatus::Timeout);
  CHECK(r.manifests[4].status == core::RunStatus::Oom);
  for (std::size_t i : {1u, 3u, 5u}) CHECK(r.manifests[i].status == core::RunStatus::Ok);
}

TEST_CASE("run_queue: losing the device aborts and keeps completed runs") {
  auto p = fast_profile();
  p.faults = {{FaultKind::Disconnect, 4, 1}};
  Bench b(p);
  const auto r = b.run(two_by_three());
  CHECK(r.aborted);
  REQUIRE(r.manifests.size() == 4);
  CHECK(r.manifests[3].status == core::RunStatus::DeviceError);
  CHECK(r.manifests[2].status == core::RunStatus::Ok);

  auto brick = fast_profile();
  brick.never_boot = true;
  Bench dead(brick);
  dead.agent.power(PowerAction::Off);
  RunnerConfig cfg;
  cfg.power_timeout_s = 1;
  const auto none = dead.run(two_by_three(), cfg);
  CHECK(none.aborted);
  CHECK(none.manifests.empty());
  CHECK(none.abort_reason.find("PowerTimeout") != std::string::npos);
}

TEST_CASE("run_queue: empty queue, serial intervals, run directories") {
  Bench b(fast_profile());
  JobQueue empty;
  const auto r0 = b.run(empty);
  CHECK(r0.manifests.empty());
  CHECK(r0.log.empty());

  test::TempDir out("melt-runs");
  RunnerConfig cfg;
  cfg.out_dir = out.path();
  auto q = two_by_three();
  q.specs.resize(1);
  q.specs[0].iterations = 2;
  Bench c(fast_profile());
  const auto r = c.run(q, cfg);
  REQUIRE(r.manifests.size() == 2);
  const auto dir = out.path() / r.manifests[1].run_id;
  for (const char* f : {"manifest.json", "events.jsonl", "power.csv", "temperature.csv", "responses.json"})
    CHECK(std::filesystem::exists(dir / f));
  const auto m = nlohmann::json::parse(test::read_file(dir / "manifest.json")).get<core::RunManifest>();
  CHECK(m == r.manifests[1]);
  CHECK(m.artifact_paths.size() == 4);
}

TEST_CASE("run_queue: sysfs devices produce rail traces") {
  auto dev = agent::default_sim_device();
  dev.lab = core::Lab::Edge;
  dev.power_source = core::PowerSource::Sysfs;
  dev.battery_capacity_mah.reset();
  Bench b(fast_profile(), dev);
  auto q = two_by_three();
  q.specs.resize(1);
  q.specs[0].iterations = 1;
  q.specs[0].device = dev;
  const auto r = b.run(q);
  REQUIRE(r.artifacts.size() == 1);
  const auto& p = r.artifacts[0].capture.power;
  CHECK_FALSE(p.is_electrical());
  CHECK(p.rail("GPU") != nullptr);
  CHECK(p.total_rail().synthesized);
  CHECK(p.nominal_rate_hz() == doctest::Approx(100).epsilon(1e-3));
  CHECK(step_names(r).front() == "power_on");
}

TEST_CASE("queue file: shipped queues load and expand grids in order") {
  const auto demo = load_queue(test::data_dir() / "queues" / "sim-demo.json");
  CHECK(demo.queue.specs.size() == 2);
  CHECK(demo.queue.device.id == "sim-phone");
  CHECK(demo.profile.has_value());
  CHECK(demo.queue.specs[1].backend == core::Backend::LlamaCpp);
  for (const auto& s : demo.queue.specs) CHECK(demo.queue.conversations.count(s.conversations_uri) == 1);

  const auto grid = load_queue(test::data_dir() / "queues" / "grid-sweep.json");
  REQUIRE(grid.queue.specs.size() == 9);
  CHECK(grid.queue.specs[0].grid_point() == core::GridPoint{512, 64, 128});
  CHECK(grid.queue.specs[1].grid_point() == core::GridPoint{512, 64, 512});
  CHECK(grid.queue.specs[8].grid_point() == core::GridPoint{2048, 256, 1024});

  QueueOverrides o;
  o.iterations = 1;
  o.sleep_between_s = 0.5;
  o.conversation_timeout_s = 10;
  const auto over = load_queue(test::data_dir() / "queues" / "sim-demo.json", o);
  for (const auto& s : over.queue.specs) {
    CHECK(s.iterations == 1);
    CHECK(s.sleep_between_s == 0.5);
    CHECK(s.conversation_timeout_s == 10);
  }
  o = {};
  o.device_id = "no-such-device";
  CHECK(error_of([&] { load_queue(test::data_dir() / "queues" / "sim-demo.json", o); }) == Errc::NotFound);
}

TEST_CASE("queue file: malformed queues are rejected") {
  test::TempDir dir("melt-queue");
  const auto reg = (test::data_dir() / "registry.json").string();
  const auto convs = (test::data_dir() / "conversations" / "six-prompts.json").string();
  auto write = [&](const std::string& body) {
    test::write_file(dir / "q.json", body);
    return dir / "q.json";
  };
  const std::string head = R"({"registry": ")" + reg + R"(", "device": "sim-phone", "experiments": [)";
  CHECK(error_of([&] { load_queue(write(head + R"({"model": "TinyLlama-1.1B-q4", "backend": "sim", "mode": "macro", "conversations": ")" + convs + R"(", "bogus": 1}]})")); }) == Errc::MalformedConfig);
  CHECK(error_of([&] { load_queue(write(head + R"({"model": "Nope", "backend": "sim", "mode": "macro", "conversations": ")" + convs + R"("}]})")); }) == Errc::NotFound);
  CHECK(error_of([&] { load_queue(write(head + R"({"model": "TinyLlama-1.1B-q4", "backend": "sim", "mode": "macro", "conversations": ")" + convs + R"(", "grid": {"contexts": [1, 2], "max_gen_lengths": [1], "batch_sizes": [1]}}]})")); }) == Errc::LengthMismatch);
  CHECK(error_of([&] { load_queue(write("{")); }) == Errc::MalformedConfig);
  CHECK(error_of([&] { load_queue(dir / "missing.json"); }) == Errc::IoError);

  const auto big = load_queue(write(head + R"({"model": "Llama-2-13B-q4", "backend": "mlc-llm", "mode": "micro", "conversations": ")" + convs + R"(", "context_size": 1024, "max_gen_length": 256, "batch_size": 128}]})"));
  CHECK_FALSE(big.warnings.empty());
}

TEST_CASE("conversations: json round trip and counts") {
  const auto c = load_conversations(test::data_dir() / "conversations" / "six-prompts.json");
  CHECK(c.prompt_count() == 6);
  nlohmann::json j = c;
  CHECK(j.get<ConversationSet>() == c);
  CHECK(error_of([] { nlohmann::json::parse(R"({"conversations": [[{"prompt_tokens": 0}]]})").get<ConversationSet>(); }) ==
        Errc::MalformedConfig);
}

TEST_CASE("protocol: codecs round trip and errors keep their code") {
  for (const auto& s : std::vector<std::string>{"", "a", "ab", "abc", "abcd", std::string("\0\xff\x01", 3)})
    CHECK(protocol::base64_decode(protocol::base64_encode(s)) == s);
  CHECK(protocol::base64_encode("abc") == "YWJj");
  CHECK(error_of([] { protocol::base64_decode("@@@"); }) == Errc::MalformedConfig);

  PromptRequest p;
  p.run_id = "r";
  p.prompt_index = 7;
  p.prompt_tokens = 33;
  p.gen_tokens = 5;
  p.max_gen_length = 64;
  p.context_size = 512;
  p.micro = true;
  p.first_in_conversation = true;
  p.deadline_ns = 99;
  const auto q = protocol::prompt_request_from_json(protocol::to_json(p));
  CHECK(q.run_id == p.run_id);
  CHECK(q.prompt_index == 7);
  CHECK(q.gen_tokens == 5);
  CHECK(q.micro);
  CHECK(q.deadline_ns == 99);

  const Error e(Errc::AgentOom, "killed");
  const auto body = protocol::error_body(e).dump();
  const auto back = protocol::error_from_body(protocol::error_status(e.code()), body);
  CHECK(back.code() == Errc::AgentOom);
  CHECK(std::string(back.what()).find("killed") != std::string::npos);
  CHECK(protocol::error_status(Errc::AgentUnreachable) == 503);
  CHECK(protocol::error_status(Errc::Timeout) == 504);
  CHECK(protocol::error_from_body(502, "<html>").code() == Errc::IoError);

  Capture c{test::constant_trace(1000, 0.01, 1000), powertrace::TempTrace{{{0, "soc", 30}}}};
  const auto cc = protocol::capture_from_json(protocol::capture_to_json(c));
  CHECK(cc.power.samples() == c.power.samples());
  CHECK(cc.temperature == c.temperature);
}
