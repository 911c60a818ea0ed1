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

#include "melt/core/types.hpp"

#include <array>
#include <utility>

#include "melt/core/error.hpp"

namespace melt::core {
namespace {

template <class E, std::size_t N>
using Table = std::array<std::pair<E, std::string_view>, N>;

constexpr Table<QuantScheme, 5> kQuant{{{QuantScheme::GroupQuant, "group-quant"},
                                         {QuantScheme::Gptq, "gptq"},
                                         {QuantScheme::Awq, "awq"},
                                         {QuantScheme::KQuants, "k-quants"},
                                         {QuantScheme::None, "none"}}};
constexpr Table<ModelFormat, 3> kFormat{
    {{ModelFormat::Gguf, "gguf"}, {ModelFormat::TvmLib, "tvm-lib"}, {ModelFormat::Raw, "raw"}}};
constexpr Table<Lab, 3> kLab{{{Lab::Phone, "phone"}, {Lab::Edge, "edge"}, {Lab::Sim, "sim"}}};
constexpr Table<Platform, 4> kPlatform{{{Platform::Android, "android"},
                                        {Platform::Ios, "ios"},
                                        {Platform::Linux, "linux"},
                                        {Platform::Sim, "sim"}}};
constexpr Table<Tier, 2> kTier{{{Tier::Mid, "mid"}, {Tier::High, "high"}}};
constexpr Table<PowerSource, 3> kPowerSource{
    {{PowerSource::Monsoon, "monsoon"}, {PowerSource::Sysfs, "sysfs"}, {PowerSource::Sim, "sim"}}};
constexpr Table<Backend, 4> kBackend{{{Backend::MlcLlm, "mlc-llm"},
                                      {Backend::LlamaCpp, "llama-cpp"},
                                      {Backend::LlmFarm, "llmfarm"},
                                      {Backend::Sim, "sim"}}};
constexpr Table<Mode, 2> kMode{{{Mode::Macro, "macro"}, {Mode::Micro, "micro"}}};
constexpr Table<RunStatus, 4> kStatus{{{RunStatus::Ok, "ok"},
                                       {RunStatus::Oom, "oom"},
                                       {RunStatus::Timeout, "timeout"},
                                       {RunStatus::DeviceError, "device_error"}}};

template <class E, std::size_t N>
std::string_view lookup(const Table<E, N>& table, E v) {
  for (const auto& [key, name] : table)
    if (key == v) return name;
  return "?";
}

template <class E, std::size_t N>
E reverse(const Table<E, N>& table, std::string_view name, std::string_view what) {
  for (const auto& [key, n] : table)
    if (n == name) return key;
  throw Error(Errc::MalformedConfig, "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(QuantScheme v) { return lookup(kQuant, v); }
std::string_view to_string(ModelFormat v) { return lookup(kFormat, v); }
std::string_view to_string(Lab v) { return lookup(kLab, v); }
std::string_view to_string(Platform v) { return lookup(kPlatform, v); }
std::string_view to_string(Tier v) { return lookup(kTier, v); }
std::string_view to_string(PowerSource v) { return lookup(kPowerSource, v); }
std::string_view to_string(Backend v) { return lookup(kBackend, v); }
std::string_view to_string(Mode v) { return lookup(kMode, v); }
std::string_view to_string(RunStatus v) { return lookup(kStatus, v); }

template <> QuantScheme parse_enum<QuantScheme>(std::string_view n) { return reverse(kQuant, n, "quant_scheme"); }
template <> ModelFormat parse_enum<ModelFormat>(std::string_view n) { return reverse(kFormat, n, "format"); }
template <> Lab parse_enum<Lab>(std::string_view n) { return reverse(kLab, n, "lab"); }
template <> Platform parse_enum<Platform>(std::string_view n) { return reverse(kPlatform, n, "platform"); }
template <> Tier parse_enum<Tier>(std::string_view n) { return reverse(kTier, n, "tier"); }
template <> PowerSource parse_enum<PowerSource>(std::string_view n) { return reverse(kPowerSource, n, "power_source"); }
template <> Backend parse_enum<Backend>(std::string_view n) { return reverse(kBackend, n, "backend"); }
template <> Mode parse_enum<Mode>(std::string_view n) { return reverse(kMode, n, "mode"); }
template <> RunStatus parse_enum<RunStatus>(std::string_view n) { return reverse(kStatus, n, "status"); }

}  // namespace melt::core
