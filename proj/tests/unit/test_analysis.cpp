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

#include <cmath>
#include <numeric>
#include <random>

#include "melt/agent/sim_agent.hpp"
#include "melt/analysis/align.hpp"
#include "melt/analysis/degradation.hpp"
#include "melt/analysis/integrate.hpp"
#include "melt/analysis/metrics.hpp"
#include "melt/analysis/ops.hpp"
#include "melt/analysis/smooth.hpp"
#include "melt/analysis/thermal.hpp"
#include "melt/orchestrator/runner.hpp"
#include "sim_run.hpp"
#include "support.hpp"

using namespace melt;
using namespace melt::analysis;
using melt::agent::Event;
using melt::agent::EventKind;
using melt::agent::EventPhase;
using melt::test::error_of;
using melt::test::noise_free;
using melt::test::simulate;
using melt::test::timeline_of;

namespace {

double riemann_oracle(const std::function<double(double)>& f, double t0, double t1, double rate) {
  // 10x oversampled midpoint rule.
  const double h = 1.0 / (10 * rate);
  const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / h));
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += f(t0 + (static_cast<double>(i) + 0.5) * h);
  return sum * h / 3600.0;
}

std::function<double(double)> random_signal(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double c = 500 + 4000 * u(rng), slope = 400 * (u(rng) - 0.5), amp = 300 * u(rng), freq = 0.2 + 5 * u(rng),
               phase = 6.28 * u(rng);
  return [=](double t) { return c + slope * t + amp * std::sin(2 * M_PI * freq * t + phase); };
}

}  // namespace

TEST_CASE("integrate: closed forms") {
  const auto c = test::constant_trace(5000, 10, 5000);
  const auto w = integrate(c, 0, 10);
  CHECK(std::abs(w.energy_mwh_gross - 5000.0 * 10 / 3600) <= 1e-9 * w.energy_mwh_gross);
  CHECK(w.energy_mwh_gross == doctest::Approx(13.8889).epsilon(1e-5));
  CHECK(w.energy_mwh_net == w.energy_mwh_gross);
  CHECK(w.duration_s() == 10);

  const auto ramp = test::sampled_trace([](double t) { return 1000 * t; }, 1, 5000);
  CHECK(integrate(ramp, 0, 1).energy_mwh_gross == doctest::Approx(0.138889).epsilon(1e-6));

  const auto zero = test::constant_trace(0, 1, 100);
  const auto z = integrate(zero, 0, 1);
  CHECK(z.energy_mwh_gross == 0);
  CHECK(*z.charge_mah_gross == 0);

  const auto mid = integrate(c, 1.00003, 2.00003);
  CHECK(mid.energy_mwh_gross == doctest::Approx(integrate(c, 1, 2).energy_mwh_gross).epsilon(1e-12));
}

TEST_CASE("integrate: preconditions") {
  const auto c = test::constant_trace(5000, 1, 1000);
  CHECK(error_of([&] { integrate(c, 0.5, 0.5); }) == Errc::DegenerateWindow);
  CHECK(error_of([&] { integrate(c, 0.6, 0.5); }) == Errc::DegenerateWindow);
  CHECK(error_of([&] { integrate(c, -0.1, 0.5); }) == Errc::WindowOutOfRange);
  CHECK(error_of([&] { integrate(c, 0.5, 1.1); }) == Errc::WindowOutOfRange);
  CHECK(error_of([&] { integrate(powertrace::PowerTrace{}, 0, 1); }) == Errc::EmptyTrace);
  const auto one = powertrace::PowerTrace::electrical({{0, 1, 3.8}});
  CHECK(error_of([&] { integrate(one, 0, 1); }) == Errc::EmptyTrace);
}

TEST_CASE("integrate: baseline, net, negative flag, charge consistency") {
  const auto c = test::constant_trace(5000, 10, 1000);
  const powertrace::BaselinePower b{380, 0, 5, 5001};
  const auto w = integrate(c, 0, 10, b);
  CHECK(w.energy_mwh_net == doctest::Approx(4620.0 * 10 / 3600));
  CHECK(*w.charge_mah_net == doctest::Approx(4620.0 / 3.8 * 10 / 3600));
  CHECK(w.energy_mwh_gross >= w.energy_mwh_net);
  CHECK_FALSE(w.negative_net_flag);
  CHECK(*w.charge_mah_gross * 3.8 == doctest::Approx(w.energy_mwh_gross).epsilon(1e-12));

  const auto net = powertrace::subtract_baseline(c, b);
  const auto n = integrate(net, 0, 10);
  CHECK(n.energy_mwh_gross == doctest::Approx(w.energy_mwh_gross));
  CHECK(n.energy_mwh_net == doctest::Approx(w.energy_mwh_net));

  const auto low = integrate(test::constant_trace(200, 1, 1000), 0, 1, b);
  CHECK(low.negative_net_flag);
  CHECK(low.energy_mwh_net < 0);
}

TEST_CASE("integrate: matches a 10x midpoint Riemann oracle on smooth traces") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 30; ++k) {
    const auto f = random_signal(rng);
    const auto t = test::sampled_trace(f, 2.0, 5000);
    const double e = integrate(t, 0.1, 1.9).energy_mwh_gross;
    CHECK(std::abs(e - riemann_oracle(f, 0.1, 1.9, 5000)) <= 1e-3 * std::abs(e));
  }
}

TEST_CASE("integrate: additivity at interior points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 1.95);
  for (int k = 0; k < 50; ++k) {
    const auto t = test::sampled_trace(random_signal(rng), 2.0, 1000);
    double a = 0.01, c = 1.99, b = u(rng);
    const double whole = integrate(t, a, c).energy_mwh_gross;
    const double parts = integrate(t, a, b).energy_mwh_gross + integrate(t, b, c).energy_mwh_gross;
    CHECK(std::abs(whole - parts) <= 1e-9 * std::abs(whole));
  }
}

TEST_CASE("integrate: sysfs traces use the TOTAL rail and carry no charge") {
  const auto t = powertrace::PowerTrace::rails({{"CPU", powertrace::RailKind::Cpu, {0, 1}, {100, 100}, false},
                                                {"GPU", powertrace::RailKind::Gpu, {0, 1}, {200, 200}, false}});
  const auto w = integrate(t, 0, 1);
  CHECK(w.energy_mwh_gross == doctest::Approx(300.0 / 3600));
  CHECK_FALSE(w.charge_mah_gross.has_value());
}

TEST_CASE("align: identity at zero offset, shift, partial flag") {
  std::vector<Event> ev = {{1'000, EventKind::Idle, EventPhase::Instant, {}}};
  CHECK(to_host_timebase(ev, {0, 0, 0}) == ev);
  CHECK(to_host_timebase(ev, {100, 0, 0})[0].ts_ns == 900);

  core::RunManifest m;
  m.host_start_ns = 0;
  const auto power = test::constant_trace(100, 10, 100);
  std::vector<Event> inside = {{5'000'000'000, EventKind::Idle, EventPhase::Instant, {}},
                               {10'900'000'000, EventKind::Idle, EventPhase::Instant, {}}};
  CHECK_FALSE(align(inside, power, std::nullopt, m).partial);
  std::vector<Event> beyond = {{12'000'000'000, EventKind::Idle, EventPhase::Instant, {}}};
  const auto tl = align(beyond, power, std::nullopt, m);
  CHECK(tl.partial);
  CHECK(tl.trace_seconds(2'500'000'000) == doctest::Approx(2.5));
  m.clock_sync.offset_ns = 3'000'000'000;
  CHECK_FALSE(align(beyond, power, std::nullopt, m).partial);
}

TEST_CASE("align: simulator phase boundaries match the power steps after alignment") {
  for (std::int64_t offset : {-500'000'000LL, 0LL, 100'000'000LL, 123'000'000LL}) {
    auto p = noise_free();
    p.clock_offset_ns = offset;
    p.probe_rtt_ns = 2'000'000;
    p.probe_jitter_frac = 0.3;
    p.tail_tau_s = 0;
    const auto run = simulate(p, {{{{32, 8}, {64, 16}}}});
    const auto tl = timeline_of(run);
    CHECK_FALSE(tl.partial);
    const double period = 1.0 / 5000;
    const double slack = static_cast<double>(tl.manifest.clock_sync.rtt_ns) / 2e9 + period;
    const auto ts = tl.power.times();
    // Each prefill begin should line up with the first sample at the prefill level.
    for (const auto& e : tl.events) {
      if (e.kind != EventKind::Prefill || e.phase != EventPhase::Begin) continue;
      const double t_event = tl.trace_seconds(e.ts_ns);
      std::size_t i = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t_event - 0.01) - ts.begin());
      while (i < ts.size() && tl.power.power_mw(i) < p.prefill_power_mw - 1e-6) ++i;
      REQUIRE(i < ts.size());
      CHECK(std::abs(ts[i] - t_event) <= slack);
    }
  }
}

TEST_CASE("prompt_metrics: simulator ground truth for a noise-free profile") {
  const auto run = simulate(noise_free(), {{{{32, 50}, {48, 75}, {160, 100}}}});
  const auto tl = timeline_of(run);
  const auto base = powertrace::estimate_baseline(tl.power, 0, run.manifest.idle_lead_s);
  // The last lead sample already sits at the load level; allow half a sample of that step.
  const double step_bias = (run.profile.load_power_mw - 380) * (1.0 / 5000) / 2 / run.manifest.idle_lead_s;
  CHECK(std::abs(base.mean_power_mw - 380) <= step_bias + 1e-9);
  const auto pm = prompt_metrics(tl, base);
  REQUIRE(pm.size() == 3);
  for (const auto& m : pm) {
    CHECK(std::abs(m.generation_tps - 25) / 25 < 0.005);
    CHECK(std::abs(m.prefill_tps - 80) / 80 < 0.005);
    CHECK(m.energy_mwh_per_token_gross == doctest::Approx(5000.0 / (25 * 3600)).epsilon(0.01));
    CHECK(m.energy_mwh_per_token == doctest::Approx(4620.0 / (25 * 3600)).epsilon(0.01));
    CHECK(*m.discharge_mah_per_token_gross * 3.8 == doctest::Approx(m.energy_mwh_per_token_gross).epsilon(1e-9));
    CHECK(m.max_temp_c.has_value());
  }
  CHECK(pm[0].generated_tokens == 50);
  CHECK(pm[2].prompt_tokens == 160);
  REQUIRE(pm[0].load_time_s.has_value());
  CHECK(*pm[0].load_time_s == doctest::Approx(2.41));
  CHECK_FALSE(pm[1].load_time_s.has_value());
}

TEST_CASE("prompt_metrics: malformed prompt events") {
  core::RunManifest m;
  const auto power = test::constant_trace(100, 10, 100);
  auto build = [&](std::vector<Event> ev) { return align(std::move(ev), power, std::nullopt, m); };
  using A = std::map<std::string, agent::AttrValue>;
  const A p0{{"prompt_index", std::int64_t{0}}, {"tokens", std::int64_t{8}}};
  const A d0{{"prompt_index", std::int64_t{0}}, {"token_index", std::int64_t{0}}};
  CHECK(error_of([&] {
          prompt_metrics(build({{1, EventKind::Prefill, EventPhase::Begin, p0}, {2, EventKind::Prefill, EventPhase::End, p0}}));
        }) == Errc::MalformedTrace);
  CHECK(error_of([&] { prompt_metrics(build({{1, EventKind::Prefill, EventPhase::Begin, p0}})); }) == Errc::MalformedTrace);
  CHECK(error_of([&] { prompt_metrics(build({{1, EventKind::DecodeToken, EventPhase::Instant, d0}})); }) ==
        Errc::MalformedTrace);
  const auto ok = prompt_metrics(build({{1'000'000'000, EventKind::Prefill, EventPhase::Begin, p0},
                                        {2'000'000'000, EventKind::Prefill, EventPhase::End, p0},
                                        {3'000'000'000, EventKind::DecodeToken, EventPhase::Instant, d0}}));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].prefill_tps == 8);
  CHECK(ok[0].generation_tps == 1);
  CHECK(ok[0].energy_mwh_per_token == doctest::Approx(100.0 / 3600));
}

TEST_CASE("battery projection") {
  CHECK(battery_projection(3785, 6.9733) == doctest::Approx(542.78).epsilon(0.01 / 542.78));
  CHECK(battery_projection(100, 3) == doctest::Approx(33.3333333));
  CHECK(error_of([] { battery_projection(0, 1); }) == Errc::NonPositiveInput);
  CHECK(error_of([] { battery_projection(100, 0); }) == Errc::NonPositiveInput);
  CHECK(error_of([] { battery_projection(100, -2); }) == Errc::NonPositiveInput);
}

TEST_CASE("smooth: constant, identity, impulse oracle, linearity") {
  const std::vector<double> c(50, 3.0);
  for (double v : smooth(c, 7)) CHECK(v == doctest::Approx(3.0));
  std::vector<double> x(100);
  std::iota(x.begin(), x.end(), 0.0);
  CHECK(smooth(x, 1) == x);
  CHECK(error_of([&] { smooth(x, 0); }) == Errc::InvalidArgument);
  CHECK(smooth(std::vector<double>{}, 5).empty());

  std::vector<double> imp(2000, 0.0);
  imp[1000] = 7.0;
  const std::size_t n = 500;
  const auto s = smooth(imp, n);
  for (std::size_t i = 0; i < imp.size(); ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>((n - 1) / 2));
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(imp.size()) - 1,
                                                       static_cast<std::ptrdiff_t>(i + n / 2));
    double sum = 0;
    for (auto k = lo; k <= hi; ++k) sum += imp[static_cast<std::size_t>(k)];
    CHECK(s[i] == doctest::Approx(sum / static_cast<double>(hi - lo + 1)));
  }
  CHECK(s[1000] == doctest::Approx(7.0 / 500));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(300), b(300), mix(300);
  for (std::size_t i = 0; i < 300; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
    mix[i] = 2.5 * a[i] - 0.75 * b[i];
  }
  const auto sa = smooth(a, 9), sb = smooth(b, 9), sm = smooth(mix, 9);
  for (std::size_t i = 0; i < 300; ++i) CHECK(sm[i] == doctest::Approx(2.5 * sa[i] - 0.75 * sb[i]).epsilon(1e-9));
}

TEST_CASE("degradation: seeded step fixture, constant and improving series") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 0.01);
    std::vector<double> s(50);
    for (std::size_t i = 0; i < 50; ++i) s[i] = 25 * (i >= 20 ? 0.9 : 1) * (i >= 32 ? 0.9 : 1) * (1 + g(rng));
    const auto r = detect_degradation(s);
    hits += r.changepoints.size() == 2 && std::llabs(static_cast<long long>(r.changepoints[0]) - 20) <= 2 &&
            std::llabs(static_cast<long long>(r.changepoints[1]) - 32) <= 2;
    CHECK(r.window_w == 5);
    CHECK(std::is_sorted(r.changepoints.begin(), r.changepoints.end()));
  }
  CHECK(hits >= 18);

  CHECK(detect_degradation(std::vector<double>(50, 25.0)).changepoints.empty());
  std::vector<double> up(50);
  for (std::size_t i = 0; i < 50; ++i) up[i] = 25 * std::pow(1.01, static_cast<double>(i));
  CHECK(detect_degradation(up).changepoints.empty());

  std::vector<double> step(30, 10.0);
  for (std::size_t i = 15; i < 30; ++i) step[i] = 5.0;
  const auto r = detect_degradation(step, 5, 0.05);
  CHECK(r.changepoints == std::vector<std::size_t>{11});
}

TEST_CASE("degradation: scale invariance and preconditions") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0, 0.02);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(40), k(40);
    for (std::size_t i = 0; i < 40; ++i) s[i] = 20 * (i >= 25 ? 0.85 : 1) * (1 + g(rng));
    for (double f : {0.001, 3.0, 1e6}) {
      std::transform(s.begin(), s.end(), k.begin(), [f](double v) { return v * f; });
      CHECK(detect_degradation(k).changepoints == detect_degradation(s).changepoints);
    }
  }
  CHECK(error_of([] { detect_degradation(std::vector<double>(10, 1.0), 5); }) == Errc::SeriesTooShort);
  CHECK_NOTHROW(detect_degradation(std::vector<double>(11, 1.0), 5));
  CHECK(error_of([] { detect_degradation(std::vector<double>(11, 1.0), 5, 0); }) == Errc::InvalidArgument);
  CHECK(error_of([] { detect_degradation(std::vector<double>(11, 1.0), 5, 1); }) == Errc::InvalidArgument);
  CHECK(error_of([] { detect_degradation(std::vector<double>(11, 1.0), 0); }) == Errc::InvalidArgument);
}

TEST_CASE("ops: shares of the selected stage") {
  auto op = [](const char* name, double us, const char* stage) {
    return Event{0, EventKind::Op, EventPhase::Instant,
                 {{"op_name", std::string(name)}, {"duration_us", us}, {"stage", std::string(stage)}}};
  };
  std::vector<Event> ev = {op("dequantize_matmul", 60000, "prefill"), op("dequantize_matmul", 37000, "prefill"),
                           op("softmax", 2000, "prefill"),            op("rms_norm", 1000, "prefill"),
                           op("embed", 500, "embed"),                 op("dequantize_matmul", 10, "decode")};
  const auto s = per_op_summary(ev, "prefill");
  CHECK(s.at("dequantize_matmul").share == doctest::Approx(0.97));
  CHECK(s.at("dequantize_matmul").count == 2);
  CHECK(s.at("dequantize_matmul").total_us == 97000);
  double total = 0;
  for (const auto& [_, v] : s) total += v.share;
  CHECK(std::abs(total - 1) < 1e-9);
  CHECK(share_matching(s, "matmul") == doctest::Approx(0.97));

  const auto single = per_op_summary(ev, "embed");
  REQUIRE(single.size() == 1);
  CHECK(single.at("embed").share == 1.0);
  CHECK(per_op_summary(ev, "lm_head").empty());
  CHECK(per_op_summary(ev).size() == 4);
}

TEST_CASE("thermal: constant, ramp, windows") {
  powertrace::TempTrace c;
  for (int i = 0; i <= 10; ++i) c.samples.push_back({i * 1.0, "soc", 25});
  const auto s = thermal_summary(c, 0, 10);
  CHECK(s.max_c == 25);
  CHECK(s.mean_c == 25);

  powertrace::TempTrace ramp;
  for (int i = 0; i <= 100; ++i) {
    ramp.samples.push_back({i * 0.1, "soc", 30 + (47.9 - 30) * i / 100.0});
    ramp.samples.push_back({i * 0.1, "battery", 28});
  }
  const auto r = thermal_summary(ramp, 0, 10);
  CHECK(r.max_c == doctest::Approx(47.9));
  CHECK(r.sensors.at("soc").max_c == doctest::Approx(47.9));
  CHECK(r.sensors.at("battery").mean_c == 28);
  CHECK(r.sensors.at("soc").count == 101);
  CHECK(error_of([&] { thermal_summary(ramp, -5, -1); }) == Errc::WindowOutOfRange);
  CHECK(error_of([&] { thermal_summary(ramp, 5, 4); }) == Errc::DegenerateWindow);
}

TEST_CASE("load_run reads a written run directory") {
  const auto run = simulate(noise_free(), {{{{32, 10}}}}, 1000);
  test::TempDir dir("melt-run");
  auto manifest = run.manifest;
  orchestrator::write_run_dir(dir.path(), manifest, run.artifacts);
  const auto tl = load_run(dir.path());
  CHECK(tl.manifest == manifest);
  CHECK(tl.power.size() == run.artifacts.capture.power.size());
  CHECK(tl.temperature.has_value());
  CHECK(tl.offset_ns == manifest.clock_sync.offset_ns);
  const auto direct = timeline_of(run);
  CHECK(prompt_metrics(tl) == prompt_metrics(direct));

  std::filesystem::remove(dir / "power.csv");
  CHECK(error_of([&] { load_run(dir.path()); }) == Errc::IoError);
  CHECK(error_of([&] { load_run(dir / "nope"); }) == Errc::IoError);
}
