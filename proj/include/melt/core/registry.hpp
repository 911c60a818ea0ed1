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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "melt/core/json_io.hpp"
#include "melt/core/types.hpp"

namespace melt::core {

/// Model zoo and device farm descriptors loaded from a manifest file with
/// top-level `models` and `devices` arrays. Read-only after load.
class Registry {
 public:
  Registry() = default;
  Registry(std::vector<ModelDescriptor> models, std::vector<DeviceDescriptor> devices,
           std::filesystem::path base_dir = {});

  static Registry from_json(const json& j, std::filesystem::path base_dir = {});
  static Registry load(const std::filesystem::path& path);

  json to_json() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<ModelDescriptor>& models() const { return models_; }
  const std::vector<DeviceDescriptor>& devices() const { return devices_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  const ModelDescriptor* find_model(std::string_view name) const;
  const DeviceDescriptor* find_device(std::string_view id) const;
  /// Throws NotFound.
  const DeviceDescriptor& device(std::string_view id) const;

 private:
  std::vector<ModelDescriptor> models_;
  std::vector<DeviceDescriptor> devices_;
  std::filesystem::path base_dir_;
};

/// Throws MalformedConfig naming the first broken invariant.
void validate_descriptor(const ModelDescriptor& m);
void validate_descriptor(const DeviceDescriptor& d);

/// Local path for an artifact locator, resolved against the registry
/// directory. `file://` prefixes are stripped; other schemes yield empty.
std::filesystem::path artifact_path(const Registry& registry, const ModelDescriptor& m);

/// Exact-name lookup. When the artifact file exists locally its SHA-256 is
/// computed: a recorded digest must match (DigestMismatch otherwise) and a
/// missing one is filled in. Throws NotFound for unknown names.
ModelDescriptor resolve_model(const Registry& registry, std::string_view name);

}  // namespace melt::core
