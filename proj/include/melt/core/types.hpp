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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace melt::core {

enum class QuantScheme { GroupQuant, Gptq, Awq, KQuants, None };
enum class ModelFormat { Gguf, TvmLib, Raw };
enum class Lab { Phone, Edge, Sim };
enum class Platform { Android, Ios, Linux, Sim };
enum class Tier { Mid, High };
enum class PowerSource { Monsoon, Sysfs, Sim };
enum class Backend { MlcLlm, LlamaCpp, LlmFarm, Sim };
enum class Mode { Macro, Micro };
enum class RunStatus { Ok, Oom, Timeout, DeviceError };

std::string_view to_string(QuantScheme v);
std::string_view to_string(ModelFormat v);
std::string_view to_string(Lab v);
std::string_view to_string(Platform v);
std::string_view to_string(Tier v);
std::string_view to_string(PowerSource v);
std::string_view to_string(Backend v);
std::string_view to_string(Mode v);
std::string_view to_string(RunStatus v);

/// Parses the wire name of an enum; throws Error(MalformedConfig) on an
/// unknown name.
template <class E>
E parse_enum(std::string_view name);

struct ModelDescriptor {
  std::string name;
  std::string family;
  double param_count = 0;  // billions
  QuantScheme quant_scheme = QuantScheme::None;
  int bitwidth = 16;
  ModelFormat format = ModelFormat::Raw;
  std::string artifact_uri;
  std::optional<std::string> artifact_digest;  // sha256, lowercase hex

  bool operator==(const ModelDescriptor&) const = default;
};

struct DeviceDescriptor {
  std::string id;
  Lab lab = Lab::Sim;
  Platform platform = Platform::Sim;
  std::string soc;
  std::int64_t mem_gb = 1;
  std::optional<double> battery_capacity_mah;
  Tier tier = Tier::Mid;
  PowerSource power_source = PowerSource::Sim;
  std::optional<std::string> energy_mode;

  bool operator==(const DeviceDescriptor&) const = default;
};

/// Contexts and max generation lengths pair elementwise; the pairs are
/// crossed with batch sizes.
struct GridSpec {
  std::vector<std::int64_t> contexts;
  std::vector<std::int64_t> max_gen_lengths;
  std::vector<std::int64_t> batch_sizes;
};

struct GridPoint {
  std::int64_t context_size = 0;
  std::int64_t max_gen_length = 0;
  std::int64_t batch_size = 0;

  auto operator<=>(const GridPoint&) const = default;
};

/// Fixed prefill and generation length used by micro experiments.
inline constexpr std::int64_t kMicroTokens = 256;

struct ExperimentSpec {
  ModelDescriptor model;
  DeviceDescriptor device;
  Backend backend = Backend::Sim;
  std::int64_t context_size = 512;
  std::int64_t max_gen_length = 64;
  std::int64_t batch_size = 128;
  Mode mode = Mode::Macro;
  std::string conversations_uri;
  int iterations = 3;
  double sleep_between_s = 5.0;
  double conversation_timeout_s = 3600.0;

  GridPoint grid_point() const { return {context_size, max_gen_length, batch_size}; }
  bool operator==(const ExperimentSpec&) const = default;
};

/// Host/device clock relation: device_clock = host_clock + offset_ns.
struct ClockSync {
  std::int64_t offset_ns = 0;
  std::int64_t rtt_ns = 0;
  std::int64_t sampled_at_ns = 0;

  bool operator==(const ClockSync&) const = default;
};

inline constexpr std::string_view kArtifactEvents = "events";
inline constexpr std::string_view kArtifactPower = "power";
inline constexpr std::string_view kArtifactTemperature = "temperature";
inline constexpr std::string_view kArtifactResponses = "responses";

struct RunManifest {
  std::string run_id;
  ExperimentSpec spec;
  int iteration = 0;
  ClockSync clock_sync;
  std::int64_t host_start_ns = 0;  // monitor armed; power trace t=0
  std::int64_t host_end_ns = 0;    // monitor stopped
  std::map<std::string, std::string> artifact_paths;
  RunStatus status = RunStatus::Ok;
  // Start/stop notification marks posted by the device, host timebase.
  std::optional<std::int64_t> mark_start_ns;
  std::optional<std::int64_t> mark_stop_ns;
  // Idle capture at the head of the trace, [0, idle_lead_s] in trace seconds.
  double idle_lead_s = 0;
  std::string message;

  bool operator==(const RunManifest&) const = default;
};

}  // namespace melt::core
