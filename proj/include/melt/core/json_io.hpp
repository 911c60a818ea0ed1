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

#include <initializer_list>
#include <string_view>

#include <json.hpp>
#include "melt/core/types.hpp"

namespace melt::core {

using nlohmann::json;

/// Throws Error(MalformedConfig) if `obj` is not an object or carries a key
/// outside `allowed`.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view what);

void to_json(json& j, const ModelDescriptor& m);
void from_json(const json& j, ModelDescriptor& m);
void to_json(json& j, const DeviceDescriptor& d);
void from_json(const json& j, DeviceDescriptor& d);
void to_json(json& j, const GridSpec& g);
void from_json(const json& j, GridSpec& g);
void to_json(json& j, const ExperimentSpec& s);
void from_json(const json& j, ExperimentSpec& s);
void to_json(json& j, const ClockSync& c);
void from_json(const json& j, ClockSync& c);
void to_json(json& j, const RunManifest& m);
void from_json(const json& j, RunManifest& m);

}  // namespace melt::core
