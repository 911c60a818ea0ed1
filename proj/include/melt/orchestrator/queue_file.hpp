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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "melt/core/types.hpp"
#include "melt/core/validate.hpp"

namespace melt::orchestrator {

struct PromptSpec {
  std::int64_t prompt_tokens = 0;
  std::optional<std::int64_t> gen_tokens;
  bool operator==(const PromptSpec&) const = default;
};

using Conversation = std::vector<PromptSpec>;

/// {"conversations": [[{"prompt_tokens": n, "gen_tokens": m?}, ...], ...]}
struct ConversationSet {
  std::vector<Conversation> conversations;

  std::size_t prompt_count() const;
  bool operator==(const ConversationSet&) const = default;
};

void to_json(nlohmann::json& j, const ConversationSet& c);
void from_json(const nlohmann::json& j, ConversationSet& c);
ConversationSet load_conversations(const std::filesystem::path& path);

/// Ordered experiments for one device plus the conversation sets they
/// reference (keyed by ExperimentSpec::conversations_uri).
struct JobQueue {
  core::DeviceDescriptor device;
  std::vector<core::ExperimentSpec> specs;
  std::map<std::string, ConversationSet> conversations;
};

struct QueueOverrides {
  std::optional<std::string> device_id;
  std::optional<int> iterations;
  std::optional<double> sleep_between_s;
  std::optional<double> conversation_timeout_s;
};

struct QueueFile {
  JobQueue queue;
  std::optional<std::filesystem::path> profile;  // simulator profile, resolved
  std::vector<core::Violation> warnings;
};

/// Queue file layout:
///   {"registry": path, "device": id, "profile": path?,
///    "defaults": {"iterations", "sleep_between_s", "conversation_timeout_s"}?,
///    "experiments": [{"model": name, "backend": name, "mode": "macro"|"micro",
///                     "conversations": path,
///                     "grid": {"contexts", "max_gen_lengths", "batch_sizes"}
///                       | "context_size", "max_gen_length", "batch_size",
///                     "iterations"?, "sleep_between_s"?, "conversation_timeout_s"?}]}
/// Paths are relative to the queue file. Each experiment entry expands to
/// one spec per grid point. Throws MalformedConfig / NotFound.
QueueFile load_queue(const std::filesystem::path& path, const QueueOverrides& overrides = {});

}  // namespace melt::orchestrator
