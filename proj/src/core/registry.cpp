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

#include "melt/core/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "melt/core/error.hpp"
#include "melt/core/sha256.hpp"

namespace melt::core {

namespace {

bool is_hex64(const std::string& s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c) != 0; });
}

}  // namespace

void validate_descriptor(const ModelDescriptor& m) {
  if (m.name.empty()) throw Error(Errc::MalformedConfig, "model name is empty");
  if (!(m.param_count > 0)) throw Error(Errc::MalformedConfig, m.name + ": param_count must be positive");
  static constexpr int kBits[] = {3, 4, 8, 16};
  if (std::find(std::begin(kBits), std::end(kBits), m.bitwidth) == std::end(kBits))
    throw Error(Errc::MalformedConfig, m.name + ": bitwidth must be one of 3, 4, 8, 16");
  if (m.artifact_digest && !is_hex64(*m.artifact_digest))
    throw Error(Errc::MalformedConfig, m.name + ": artifact_digest must be 64 hex chars");
}

void validate_descriptor(const DeviceDescriptor& d) {
  if (d.id.empty()) throw Error(Errc::MalformedConfig, "device id is empty");
  if (d.mem_gb <= 0) throw Error(Errc::MalformedConfig, d.id + ": mem_gb must be positive");
  if (d.battery_capacity_mah && !(*d.battery_capacity_mah > 0))
    throw Error(Errc::MalformedConfig, d.id + ": battery_capacity_mah must be positive");
  if (d.lab == Lab::Phone && !d.battery_capacity_mah)
    throw Error(Errc::MalformedConfig, d.id + ": phone devices need battery_capacity_mah");
  if (d.lab == Lab::Edge && d.battery_capacity_mah)
    throw Error(Errc::MalformedConfig, d.id + ": edge devices have no battery");
  if (d.lab == Lab::Phone && d.power_source != PowerSource::Monsoon && d.power_source != PowerSource::Sim)
    throw Error(Errc::MalformedConfig, d.id + ": phone devices are metered by monsoon");
  if (d.lab == Lab::Edge && d.power_source != PowerSource::Sysfs && d.power_source != PowerSource::Sim)
    throw Error(Errc::MalformedConfig, d.id + ": edge devices are metered through sysfs");
}

Registry::Registry(std::vector<ModelDescriptor> models, std::vector<DeviceDescriptor> devices,
                   std::filesystem::path base_dir)
    : models_(std::move(models)), devices_(std::move(devices)), base_dir_(std::move(base_dir)) {
  std::set<std::string> names;
  for (const auto& m : models_) {
    validate_descriptor(m);
    if (!names.insert(m.name).second) throw Error(Errc::MalformedConfig, "duplicate model " + m.name);
  }
  std::set<std::string> ids;
  for (const auto& d : devices_) {
    validate_descriptor(d);
    if (!ids.insert(d.id).second) throw Error(Errc::MalformedConfig, "duplicate device " + d.id);
  }
}

Registry Registry::from_json(const json& j, std::filesystem::path base_dir) {
  try {
    check_keys(j, {"models", "devices"}, "registry");
    auto models = j.value("models", json::array()).get<std::vector<ModelDescriptor>>();
    auto devices = j.value("devices", json::array()).get<std::vector<DeviceDescriptor>>();
    return Registry(std::move(models), std::move(devices), std::move(base_dir));
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedConfig, e.what());
  }
}

Registry Registry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open registry " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedConfig, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json Registry::to_json() const { return json{{"models", models_}, {"devices", devices_}}; }

void Registry::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

const ModelDescriptor* Registry::find_model(std::string_view name) const {
  auto it = std::find_if(models_.begin(), models_.end(), [&](const auto& m) { return m.name == name; });
  return it == models_.end() ? nullptr : &*it;
}

const DeviceDescriptor* Registry::find_device(std::string_view id) const {
  auto it = std::find_if(devices_.begin(), devices_.end(), [&](const auto& d) { return d.id == id; });
  return it == devices_.end() ? nullptr : &*it;
}

const DeviceDescriptor& Registry::device(std::string_view id) const {
  if (const auto* d = find_device(id)) return *d;
  throw Error(Errc::NotFound, "device '" + std::string(id) + "'");
}

std::filesystem::path artifact_path(const Registry& registry, const ModelDescriptor& m) {
  std::string_view uri = m.artifact_uri;
  if (uri.empty()) return {};
  if (uri.rfind("file://", 0) == 0) uri.remove_prefix(7);
  else if (uri.find("://") != std::string_view::npos) return {};
  std::filesystem::path p{std::string(uri)};
  if (p.is_relative()) p = registry.base_dir() / p;
  return p;
}

ModelDescriptor resolve_model(const Registry& registry, std::string_view name) {
  const auto* found = registry.find_model(name);
  if (!found) throw Error(Errc::NotFound, "model '" + std::string(name) + "'");
  ModelDescriptor m = *found;
  const auto path = artifact_path(registry, m);
  std::error_code ec;
  if (!path.empty() && std::filesystem::is_regular_file(path, ec)) {
    const auto actual = sha256_file_hex(path);
    if (m.artifact_digest) {
      std::string expected = *m.artifact_digest;
      std::transform(expected.begin(), expected.end(), expected.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (expected != actual)
        throw Error(Errc::DigestMismatch, m.name + ": expected " + expected + ", file hashes to " + actual);
    }
    m.artifact_digest = actual;
  }
  return m;
}

}  // namespace melt::core
