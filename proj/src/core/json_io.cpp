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

#include "melt/core/json_io.hpp"

#include <algorithm>
#include <string>

#include "melt/core/error.hpp"

namespace melt::core {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!obj.is_object()) throw Error(Errc::MalformedConfig, std::string(what) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(Errc::MalformedConfig, "unknown key '" + key + "' in " + std::string(what));
  }
}

namespace {

template <class E>
E enum_at(const json& j, const char* key) {
  return parse_enum<E>(j.at(key).get<std::string>());
}

template <class T>
void optional_into(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
  else out.reset();
}

template <class T>
void value_into(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

void to_json(json& j, const ModelDescriptor& m) {
  j = json{{"name", m.name},
           {"family", m.family},
           {"param_count", m.param_count},
           {"quant_scheme", to_string(m.quant_scheme)},
           {"bitwidth", m.bitwidth},
           {"format", to_string(m.format)},
           {"artifact_uri", m.artifact_uri}};
  if (m.artifact_digest) j["artifact_digest"] = *m.artifact_digest;
}

void from_json(const json& j, ModelDescriptor& m) {
  check_keys(j, {"name", "family", "param_count", "quant_scheme", "bitwidth", "format", "artifact_uri", "artifact_digest"},
             "model");
  m.name = j.at("name").get<std::string>();
  m.family = j.at("family").get<std::string>();
  m.param_count = j.at("param_count").get<double>();
  m.quant_scheme = enum_at<QuantScheme>(j, "quant_scheme");
  m.bitwidth = j.at("bitwidth").get<int>();
  m.format = enum_at<ModelFormat>(j, "format");
  m.artifact_uri = j.value("artifact_uri", std::string{});
  optional_into(j, "artifact_digest", m.artifact_digest);
}

void to_json(json& j, const DeviceDescriptor& d) {
  j = json{{"id", d.id},
           {"lab", to_string(d.lab)},
           {"platform", to_string(d.platform)},
           {"soc", d.soc},
           {"mem_gb", d.mem_gb},
           {"tier", to_string(d.tier)},
           {"power_source", to_string(d.power_source)}};
  if (d.battery_capacity_mah) j["battery_capacity_mah"] = *d.battery_capacity_mah;
  if (d.energy_mode) j["energy_mode"] = *d.energy_mode;
}

void from_json(const json& j, DeviceDescriptor& d) {
  check_keys(j,
             {"id", "lab", "platform", "soc", "mem_gb", "battery_capacity_mah", "tier", "power_source", "energy_mode"},
             "device");
  d.id = j.at("id").get<std::string>();
  d.lab = enum_at<Lab>(j, "lab");
  d.platform = enum_at<Platform>(j, "platform");
  d.soc = j.value("soc", std::string{});
  d.mem_gb = j.at("mem_gb").get<std::int64_t>();
  optional_into(j, "battery_capacity_mah", d.battery_capacity_mah);
  d.tier = enum_at<Tier>(j, "tier");
  d.power_source = enum_at<PowerSource>(j, "power_source");
  optional_into(j, "energy_mode", d.energy_mode);
}

void to_json(json& j, const GridSpec& g) {
  j = json{{"contexts", g.contexts}, {"max_gen_lengths", g.max_gen_lengths}, {"batch_sizes", g.batch_sizes}};
}

void from_json(const json& j, GridSpec& g) {
  check_keys(j, {"contexts", "max_gen_lengths", "batch_sizes"}, "grid");
  g.contexts = j.at("contexts").get<std::vector<std::int64_t>>();
  g.max_gen_lengths = j.at("max_gen_lengths").get<std::vector<std::int64_t>>();
  g.batch_sizes = j.at("batch_sizes").get<std::vector<std::int64_t>>();
}

void to_json(json& j, const ExperimentSpec& s) {
  j = json{{"model", s.model},
           {"device", s.device},
           {"backend", to_string(s.backend)},
           {"context_size", s.context_size},
           {"max_gen_length", s.max_gen_length},
           {"batch_size", s.batch_size},
           {"mode", to_string(s.mode)},
           {"conversations_uri", s.conversations_uri},
           {"iterations", s.iterations},
           {"sleep_between_s", s.sleep_between_s},
           {"conversation_timeout_s", s.conversation_timeout_s}};
}

void from_json(const json& j, ExperimentSpec& s) {
  check_keys(j,
             {"model", "device", "backend", "context_size", "max_gen_length", "batch_size", "mode",
              "conversations_uri", "iterations", "sleep_between_s", "conversation_timeout_s"},
             "experiment spec");
  s.model = j.at("model").get<ModelDescriptor>();
  s.device = j.at("device").get<DeviceDescriptor>();
  s.backend = enum_at<Backend>(j, "backend");
  s.context_size = j.at("context_size").get<std::int64_t>();
  s.max_gen_length = j.at("max_gen_length").get<std::int64_t>();
  s.batch_size = j.at("batch_size").get<std::int64_t>();
  s.mode = enum_at<Mode>(j, "mode");
  s.conversations_uri = j.value("conversations_uri", std::string{});
  value_into(j, "iterations", s.iterations);
  value_into(j, "sleep_between_s", s.sleep_between_s);
  value_into(j, "conversation_timeout_s", s.conversation_timeout_s);
}

void to_json(json& j, const ClockSync& c) {
  j = json{{"offset_ns", c.offset_ns}, {"rtt_ns", c.rtt_ns}, {"sampled_at_ns", c.sampled_at_ns}};
}

void from_json(const json& j, ClockSync& c) {
  check_keys(j, {"offset_ns", "rtt_ns", "sampled_at_ns"}, "clock_sync");
  c.offset_ns = j.at("offset_ns").get<std::int64_t>();
  c.rtt_ns = j.at("rtt_ns").get<std::int64_t>();
  c.sampled_at_ns = j.at("sampled_at_ns").get<std::int64_t>();
}

void to_json(json& j, const RunManifest& m) {
  j = json{{"run_id", m.run_id},
           {"spec", m.spec},
           {"iteration", m.iteration},
           {"clock_sync", m.clock_sync},
           {"host_start_ns", m.host_start_ns},
           {"host_end_ns", m.host_end_ns},
           {"artifact_paths", m.artifact_paths},
           {"status", to_string(m.status)},
           {"idle_lead_s", m.idle_lead_s},
           {"message", m.message}};
  if (m.mark_start_ns) j["mark_start_ns"] = *m.mark_start_ns;
  if (m.mark_stop_ns) j["mark_stop_ns"] = *m.mark_stop_ns;
}

void from_json(const json& j, RunManifest& m) {
  check_keys(j,
             {"run_id", "spec", "iteration", "clock_sync", "host_start_ns", "host_end_ns", "artifact_paths", "status",
              "idle_lead_s", "message", "mark_start_ns", "mark_stop_ns"},
             "run manifest");
  m.run_id = j.at("run_id").get<std::string>();
  m.spec = j.at("spec").get<ExperimentSpec>();
  m.iteration = j.at("iteration").get<int>();
  m.clock_sync = j.at("clock_sync").get<ClockSync>();
  m.host_start_ns = j.at("host_start_ns").get<std::int64_t>();
  m.host_end_ns = j.at("host_end_ns").get<std::int64_t>();
  m.artifact_paths = j.at("artifact_paths").get<std::map<std::string, std::string>>();
  m.status = enum_at<RunStatus>(j, "status");
  value_into(j, "idle_lead_s", m.idle_lead_s);
  value_into(j, "message", m.message);
  optional_into(j, "mark_start_ns", m.mark_start_ns);
  optional_into(j, "mark_stop_ns", m.mark_stop_ns);
}

}  // namespace melt::core
