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

// melt: benchmark orchestration and analysis CLI.

#include <glob.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "melt/agent/agent_server.hpp"
#include "melt/agent/profile.hpp"
#include "melt/agent/sim_agent.hpp"
#include "melt/analysis/align.hpp"
#include "melt/core/error.hpp"
#include "melt/core/format.hpp"
#include "melt/core/json_io.hpp"
#include "melt/orchestrator/http_agent_client.hpp"
#include "melt/orchestrator/notification.hpp"
#include "melt/orchestrator/queue_file.hpp"
#include "melt/orchestrator/runner.hpp"
#include "melt/report/aggregate.hpp"
#include "melt/report/emit.hpp"
#include "melt/report/run_report.hpp"
#include "melt/report/timeline.hpp"

namespace fs = std::filesystem;
using namespace melt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);)
    if (!part.empty()) out.push_back(part);
  return out;
}

agent::SimProfile profile_or_default(const std::optional<fs::path>& path, std::optional<std::uint64_t> seed) {
  agent::SimProfile p = path ? agent::load_profile(*path) : agent::SimProfile{};
  if (seed) p.seed = *seed;
  p.validate();
  return p;
}

void write_queue_log(const fs::path& path, const orchestrator::QueueResult& result) {
  core::json log = core::json::array();
  for (const auto& e : result.log)
    log.push_back({{"step", orchestrator::to_string(e.step)},
                   {"spec_index", e.spec_index},
                   {"iteration", e.iteration},
                   {"run_id", e.run_id},
                   {"host_ns", e.host_ns},
                   {"detail", e.detail}});
  core::json out{{"aborted", result.aborted}, {"abort_reason", result.abort_reason}, {"log", std::move(log)}};
  report::write_text(path, out.dump(2) + "\n");
}

void print_manifests(const orchestrator::QueueResult& result) {
  for (const auto& m : result.manifests)
    std::cout << m.run_id << "  " << core::to_string(m.status) << "  " << m.message << "\n";
  if (result.aborted) std::cerr << "queue aborted: " << result.abort_reason << "\n";
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  fs::path queue;
  std::optional<std::string> device;
  std::optional<int> iterations;
  std::optional<double> sleep_s;
  std::optional<double> timeout_s;
  fs::path out;
  std::optional<std::string> agent_url;
  std::optional<fs::path> profile;
  std::optional<std::uint64_t> seed;
  std::optional<double> rate_hz;
};

int cmd_run(const RunArgs& a) {
  auto qf = orchestrator::load_queue(a.queue, {a.device, a.iterations, a.sleep_s, a.timeout_s});
  for (const auto& w : qf.warnings) std::cerr << "warning: " << w.message << "\n";
  fs::create_directories(a.out);

  orchestrator::RunnerConfig cfg;
  cfg.out_dir = a.out;
  cfg.sample_rate_hz = a.rate_hz;

  orchestrator::QueueResult result;
  if (a.agent_url) {
    SystemClock clock;
    orchestrator::NotificationLog marks(clock);
    orchestrator::NotificationServer listener(marks);
    orchestrator::HttpNotifier notifier("127.0.0.1", listener.port());
    orchestrator::HttpAgentClient agent(*a.agent_url, clock);
    result = orchestrator::run_queue(qf.queue, agent, agent, marks, notifier, clock, cfg);
  } else {
    auto profile = profile_or_default(a.profile ? a.profile : qf.profile, a.seed);
    VirtualClock clock;
    orchestrator::NotificationLog marks(clock);
    orchestrator::NotificationServer listener(marks);
    orchestrator::HttpNotifier notifier("127.0.0.1", listener.port());
    agent::SimAgent agent(profile, qf.queue.device, clock);
    result = orchestrator::run_queue(qf.queue, agent, agent, marks, notifier, clock, cfg);
  }
  write_queue_log(a.out / "queue_log.json", result);
  print_manifests(result);
  return result.aborted ? kExitData : kExitOk;
}

// --- agent-sim -------------------------------------------------------------

int cmd_agent_sim(const std::optional<fs::path>& profile_path, const std::string& bind,
                  std::optional<std::uint64_t> seed) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind expects host:port");
  const auto port = core::parse_int(bind.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw UsageError("bad port in --bind");
  SystemClock clock;
  agent::SimAgent agent(profile_or_default(profile_path, seed), agent::default_sim_device(), clock);
  agent::AgentServer server(agent, agent, bind.substr(0, colon), static_cast<int>(*port));
  std::cout << "agent listening on " << bind.substr(0, colon) << ":" << server.port() << std::endl;
  server.serve();
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::optional<fs::path> profile;
  fs::path prompts;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::string mode = "macro";
  std::int64_t context = 2048;
  std::int64_t max_gen = 1024;
  double idle_s = 5.0;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto profile = profile_or_default(a.profile, a.seed);
  orchestrator::JobQueue queue;
  queue.device = agent::default_sim_device();
  core::ExperimentSpec spec;
  spec.model = core::ModelDescriptor{"sim-model", "sim", 1.1, core::QuantScheme::GroupQuant, 4,
                                     core::ModelFormat::Raw, "", std::nullopt};
  spec.device = queue.device;
  spec.mode = core::parse_enum<core::Mode>(a.mode);
  spec.context_size = a.context;
  spec.max_gen_length = a.max_gen;
  spec.iterations = 1;
  spec.sleep_between_s = a.idle_s;
  spec.conversations_uri = a.prompts.string();
  queue.conversations[spec.conversations_uri] = orchestrator::load_conversations(a.prompts);
  queue.specs.push_back(spec);

  VirtualClock clock;
  orchestrator::NotificationLog marks(clock);
  orchestrator::LocalNotifier notifier(marks);
  agent::SimAgent agent(profile, queue.device, clock);
  orchestrator::RunnerConfig cfg;
  cfg.sample_rate_hz = profile.sample_rate_hz;
  auto result = orchestrator::run_queue(queue, agent, agent, marks, notifier, clock, cfg);
  if (result.manifests.empty()) throw Error(Errc::AgentUnreachable, result.abort_reason);
  orchestrator::write_run_dir(a.out, result.manifests.front(), result.artifacts.front());
  print_manifests(result);
  return result.manifests.front().status == core::RunStatus::Ok ? kExitOk : kExitData;
}

// --- analyze / report / timeline -------------------------------------------

std::pair<double, double> parse_window(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError("--baseline-window expects t0,t1");
  const auto t0 = core::parse_double(parts[0]);
  const auto t1 = core::parse_double(parts[1]);
  if (!t0 || !t1) throw UsageError("--baseline-window expects two numbers");
  return {*t0, *t1};
}

int cmd_analyze(const fs::path& run, const std::optional<std::string>& window, const fs::path& out) {
  report::AnalyzeOptions opt;
  if (window) opt.baseline_window = parse_window(*window);
  const auto rep = report::analyze_run(analysis::load_run(run), opt);
  fs::create_directories(out);
  report::emit(rep, report::Format::Json, out / "report.json");
  report::emit(rep, report::Format::Csv, out / "prompt_metrics.csv");
  for (const auto& p : rep.prompts)
    std::cout << "prompt " << p.prompt_index << ": prefill " << core::format_sig6(p.prefill_tps) << " tok/s, gen "
              << core::format_sig6(p.generation_tps) << " tok/s, " << core::format_sig6(p.energy_mwh_per_token)
              << " mWh/token\n";
  return kExitOk;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> out;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  return out;
}

core::json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot read " + file.string());
  try {
    return core::json::parse(in);
  } catch (const core::json::exception& e) {
    throw Error(Errc::MalformedConfig, file.string() + ": " + e.what());
  }
}

report::RunReport parse_report(const fs::path& file, const core::json& j) {
  try {
    return j.get<report::RunReport>();
  } catch (const core::json::exception& e) {
    throw Error(Errc::MalformedConfig, file.string() + ": " + e.what());
  }
}

int cmd_report(const std::string& runs, const std::string& group_by, const std::string& format, const fs::path& out) {
  const auto fmt = report::parse_format(format);
  std::vector<report::RunReport> reports;
  for (const auto& p : expand_glob(runs)) {
    if (fs::is_regular_file(p)) {
      // Globs over a queue output also match queue_log.json; only files shaped like reports count.
      const auto j = read_json_file(p);
      if (!j.is_object() || !j.contains("manifest")) {
        std::cerr << "warning: skipping " << p.string() << " (not a run report)\n";
        continue;
      }
      reports.push_back(parse_report(p, j));
    } else if (fs::exists(p / "report.json")) {
      reports.push_back(parse_report(p / "report.json", read_json_file(p / "report.json")));
    } else if (fs::exists(p / "manifest.json")) {
      reports.push_back(report::analyze_run(analysis::load_run(p)));
    }
  }
  const auto table = report::aggregate(reports, split(group_by, ','));
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
  report::emit(table, fmt, out);
  return kExitOk;
}

int cmd_timeline(const fs::path& run, std::size_t smooth_n, const fs::path& out) {
  report::write_text(out, report::timeline_csv(report::timeline_rows(analysis::load_run(run), smooth_n)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"melt: on-device LLM benchmark orchestration and analysis"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "execute an experiment queue against a device agent");
  run_cmd->add_option("--queue", run.queue, "queue file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--device", run.device, "device id from the registry");
  run_cmd->add_option("--iterations", run.iterations, "iterations per spec")->check(CLI::PositiveNumber);
  run_cmd->add_option("--sleep", run.sleep_s, "seconds between runs")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--timeout", run.timeout_s, "conversation timeout in seconds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_option("--agent", run.agent_url, "agent URL (http://host:port); default is an in-process simulator");
  run_cmd->add_option("--profile", run.profile, "simulator profile for the in-process agent")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "simulator seed");
  run_cmd->add_option("--sample-rate", run.rate_hz, "monitor rate in Hz")->check(CLI::PositiveNumber);

  std::optional<fs::path> agent_profile;
  std::string bind = "127.0.0.1:8750";
  std::optional<std::uint64_t> agent_seed;
  auto* agent_cmd = app.add_subcommand("agent-sim", "serve a simulated device over HTTP");
  agent_cmd->add_option("--profile", agent_profile, "simulator profile")->check(CLI::ExistingFile);
  agent_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  agent_cmd->add_option("--seed", agent_seed, "simulator seed");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run one simulated benchmark into a run directory");
  sim_cmd->add_option("--profile", sim.profile, "simulator profile")->check(CLI::ExistingFile);
  sim_cmd->add_option("--prompts", sim.prompts, "conversations file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out, "run directory")->required();
  sim_cmd->add_option("--seed", sim.seed, "simulator seed");
  sim_cmd->add_option("--mode", sim.mode, "macro or micro")->check(CLI::IsMember({"macro", "micro"}))->capture_default_str();
  sim_cmd->add_option("--context", sim.context, "context size")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--max-gen", sim.max_gen, "max generation length")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--idle", sim.idle_s, "idle lead captured before the run, seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  fs::path analyze_run_dir, analyze_out;
  std::optional<std::string> analyze_window;
  auto* analyze_cmd = app.add_subcommand("analyze", "compute metrics for one run directory");
  analyze_cmd->add_option("--run", analyze_run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--baseline-window", analyze_window, "idle window t0,t1 in trace seconds");
  analyze_cmd->add_option("--out", analyze_out, "output directory")->required();

  std::string report_runs, report_group, report_format = "csv";
  fs::path report_out;
  auto* report_cmd = app.add_subcommand("report", "aggregate runs into mean/std tables");
  report_cmd->add_option("--runs", report_runs, "glob of run directories or report files")->required();
  report_cmd->add_option("--group-by", report_group, "comma-separated keys (default: all)");
  report_cmd->add_option("--format", report_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  report_cmd->add_option("--out", report_out, "output file")->required();

  fs::path timeline_run, timeline_out;
  std::size_t timeline_smooth = 500;
  auto* timeline_cmd = app.add_subcommand("timeline", "export plot data for one run");
  timeline_cmd->add_option("--run", timeline_run, "run directory")->required()->check(CLI::ExistingDirectory);
  timeline_cmd->add_option("--smooth", timeline_smooth, "moving-average window")->check(CLI::PositiveNumber)->capture_default_str();
  timeline_cmd->add_option("--out", timeline_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*agent_cmd) return cmd_agent_sim(agent_profile, bind, agent_seed);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*analyze_cmd) return cmd_analyze(analyze_run_dir, analyze_window, analyze_out);
    if (*report_cmd) return cmd_report(report_runs, report_group, report_format, report_out);
    if (*timeline_cmd) return cmd_timeline(timeline_run, timeline_smooth, timeline_out);
  } catch (const UsageError& e) {
    std::cerr << "melt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "melt: " << e.what() << "\n";
    return e.code() == Errc::IoError ? kExitIo : kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "melt: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
