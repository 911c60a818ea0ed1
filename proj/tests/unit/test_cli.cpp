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

#include <sys/wait.h>

#include <cstdio>
#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using melt::test::data_dir;
using melt::test::read_file;
using melt::test::TempDir;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result melt_cli(const std::string& args) {
  const std::string cmd = std::string(MELT_BINARY) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Result r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(melt_cli("").code == 1);
  CHECK(melt_cli("--help").code == 0);
  CHECK(melt_cli("frobnicate").code == 1);
  CHECK(melt_cli("analyze --out /tmp").code == 1);
  CHECK(melt_cli("analyze --run /definitely/not/here --out /tmp").code == 1);
  CHECK(melt_cli("report --runs x --format xml --out /dev/null").code == 1);
  CHECK(melt_cli("timeline --run . --smooth 0 --out /dev/null").code == 1);
}

TEST_CASE("simulate, analyze and timeline on one run") {
  TempDir dir("melt-cli");
  const auto run = dir / "run";
  auto r = melt_cli("simulate --profile " + q(data_dir() / "profiles/noise-free.json") + " --prompts " +
                    q(data_dir() / "conversations/six-prompts.json") + " --out " + q(run));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  for (const char* f : {"manifest.json", "events.jsonl", "power.csv", "temperature.csv"}) CHECK(fs::exists(run / f));

  r = melt_cli("analyze --run " + q(run) + " --out " + q(dir / "an"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(r.output.find("prompt 0:") != std::string::npos);
  const auto rep = nlohmann::json::parse(read_file(dir / "an/report.json"));
  REQUIRE(rep.at("prompts").size() == 6);
  for (const auto& p : rep.at("prompts"))
    CHECK(p.at("energy_mwh_per_token_gross").get<double>() == doctest::Approx(0.0556).epsilon(0.01));
  const auto csv = read_file(dir / "an/prompt_metrics.csv");
  CHECK(count_lines(csv) == 7);
  CHECK(csv.rfind("prompt_index,", 0) == 0);

  r = melt_cli("analyze --run " + q(run) + " --baseline-window 0.5,4.5 --out " + q(dir / "an2"));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "an2/report.json")).at("baseline").at("t0") == 0.5);
  CHECK(melt_cli("analyze --run " + q(run) + " --baseline-window 1 --out " + q(dir / "an3")).code == 1);
  CHECK(melt_cli("analyze --run " + q(run) + " --baseline-window 900,901 --out " + q(dir / "an3")).code == 2);

  r = melt_cli("timeline --run " + q(run) + " --smooth 25 --out " + q(dir / "tl.csv"));
  REQUIRE(r.code == 0);
  const auto tl = read_file(dir / "tl.csv");
  CHECK(tl.rfind("ts_s,power_mw_raw,power_mw_smoothed,phase,prompt_index\n", 0) == 0);
  CHECK(tl.find(",decode,5\n") != std::string::npos);
}

TEST_CASE("run a queue and report on it deterministically") {
  TempDir dir("melt-cli");
  auto r = melt_cli("run --queue " + q(data_dir() / "queues/sim-demo.json") + " --iterations 2 --out " + q(dir / "q"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto log = nlohmann::json::parse(read_file(dir / "q/queue_log.json"));
  CHECK_FALSE(log.at("aborted").get<bool>());
  std::size_t runs = 0;
  for (const auto& e : fs::directory_iterator(dir / "q")) runs += e.is_directory();
  CHECK(runs == 4);

  r = melt_cli("report --runs " + q(dir / "q/*") + " --group-by model --format csv --out " + q(dir / "a.csv"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(melt_cli("report --runs " + q(dir / "q/*") + " --group-by model --format csv --out " + q(dir / "b.csv")).code == 0);
  const auto a = read_file(dir / "a.csv");
  CHECK(a == read_file(dir / "b.csv"));
  CHECK(a.find("Gemma-2B-Q4_K_M,run,generation_tps,") != std::string::npos);
  CHECK(a.find("TinyLlama-1.1B-q4,run,generation_tps,") != std::string::npos);

  CHECK(melt_cli("report --runs " + q(dir / "q/*") + " --format json --out " + q(dir / "a.json")).code == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "a.json")).at("rows").size() > 0);

  // A second queue run with the same seed reproduces the same table.
  CHECK(melt_cli("run --queue " + q(data_dir() / "queues/sim-demo.json") + " --iterations 2 --out " + q(dir / "q2")).code ==
        0);
  CHECK(melt_cli("report --runs " + q(dir / "q2/*") + " --group-by model --format csv --out " + q(dir / "c.csv")).code ==
        0);
  CHECK(read_file(dir / "c.csv") == a);

  CHECK(melt_cli("report --runs " + q(dir / "nothing*") + " --out " + q(dir / "x.csv")).code == 2);
  CHECK(melt_cli("report --runs " + q(dir / "q/*") + " --group-by colour --out " + q(dir / "x.csv")).code == 2);
  CHECK(melt_cli("report --runs " + q(dir / "q/*") + " --out " + q(dir / "no/such/dir/x.csv")).code == 3);
}

TEST_CASE("data and I/O errors map to exit codes 2 and 3") {
  TempDir dir("melt-cli");
  const auto run = dir / "run";
  REQUIRE(melt_cli("simulate --prompts " + q(data_dir() / "conversations/six-prompts.json") + " --out " + q(run)).code ==
          0);

  melt::test::write_file(dir / "bad.json", "{ not json");
  CHECK(melt_cli("simulate --prompts " + q(dir / "bad.json") + " --out " + q(dir / "r2")).code == 2);

  auto power = read_file(run / "power.csv");
  melt::test::write_file(run / "power.csv", power + "garbage,row\n");
  CHECK(melt_cli("analyze --run " + q(run) + " --out " + q(dir / "an")).code == 2);
  fs::remove(run / "power.csv");
  CHECK(melt_cli("analyze --run " + q(run) + " --out " + q(dir / "an")).code == 3);
}
