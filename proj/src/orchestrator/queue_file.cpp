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

#include "melt/orchestrator/queue_file.hpp"

#include <fstream>

#include "melt/core/error.hpp"
#include "melt/core/grid.hpp"
#include "melt/core/json_io.hpp"
#include "melt/core/registry.hpp"

namespace melt::orchestrator {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t ConversationSet::prompt_count() const {
  std::size_t n = 0;
  for (const auto& c : conversations) n += c.size();
  return n;
}

void to_json(json& j, const ConversationSet& c) {
  json convs = json::array();
  for (const auto& conv : c.conversations) {
    json prompts = json::array();
    for (const auto& p : conv) {
      json pj{{"prompt_tokens", p.prompt_tokens}};
      if (p.gen_tokens) pj["gen_tokens"] = *p.gen_tokens;
      prompts.push_back(std::move(pj));
    }
    convs.push_back(std::move(prompts));
  }
  j = json{{"conversations", std::move(convs)}};
}

void from_json(const json& j, ConversationSet& c) {
  core::check_keys(j, {"conversations"}, "conversations file");
  c.conversations.clear();
  for (const auto& conv : j.at("conversations")) {
    if (!conv.is_array()) throw Error(Errc::MalformedConfig, "conversation must be an array of prompts");
    Conversation out;
    for (const auto& p : conv) {
      core::check_keys(p, {"prompt_tokens", "gen_tokens"}, "prompt");
      PromptSpec ps{p.at("prompt_tokens").get<std::int64_t>(), std::nullopt};
      if (p.contains("gen_tokens")) ps.gen_tokens = p["gen_tokens"].get<std::int64_t>();
      if (ps.prompt_tokens <= 0 || (ps.gen_tokens && *ps.gen_tokens <= 0))
        throw Error(Errc::MalformedConfig, "token counts must be positive");
      out.push_back(ps);
    }
    c.conversations.push_back(std::move(out));
  }
}

namespace {

json read_json(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, std::string("cannot open ") + what + " " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedConfig, path.string() + ": " + e.what());
  }
}

fs::path relative_to(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ConversationSet load_conversations(const fs::path& path) {
  try {
    return read_json(path, "conversations file").get<ConversationSet>();
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedConfig, path.string() + ": " + e.what());
  }
}

QueueFile load_queue(const fs::path& path, const QueueOverrides& ov) {
  const json j = read_json(path, "queue file");
  const fs::path base = path.parent_path();
  QueueFile out;
  try {
    core::check_keys(j, {"registry", "device", "profile", "defaults", "experiments"}, "queue file");
    const auto registry = core::Registry::load(relative_to(base, j.at("registry").get<std::string>()));
    std::string device_id = ov.device_id ? *ov.device_id : j.value("device", std::string{});
    if (device_id.empty()) throw Error(Errc::MalformedConfig, "queue names no device");
    out.queue.device = registry.device(device_id);
    if (j.contains("profile")) out.profile = relative_to(base, j["profile"].get<std::string>());

    core::ExperimentSpec defaults;
    if (j.contains("defaults")) {
      const auto& d = j["defaults"];
      core::check_keys(d, {"iterations", "sleep_between_s", "conversation_timeout_s"}, "queue defaults");
      defaults.iterations = d.value("iterations", defaults.iterations);
      defaults.sleep_between_s = d.value("sleep_between_s", defaults.sleep_between_s);
      defaults.conversation_timeout_s = d.value("conversation_timeout_s", defaults.conversation_timeout_s);
    }

    for (const auto& e : j.at("experiments")) {
      core::check_keys(e,
                       {"model", "backend", "mode", "conversations", "grid", "context_size", "max_gen_length",
                        "batch_size", "iterations", "sleep_between_s", "conversation_timeout_s"},
                       "experiment");
      core::ExperimentSpec spec = defaults;
      spec.model = core::resolve_model(registry, e.at("model").get<std::string>());
      spec.device = out.queue.device;
      spec.backend = core::parse_enum<core::Backend>(e.value("backend", std::string("sim")));
      spec.mode = core::parse_enum<core::Mode>(e.value("mode", std::string("macro")));
      spec.iterations = e.value("iterations", spec.iterations);
      spec.sleep_between_s = e.value("sleep_between_s", spec.sleep_between_s);
      spec.conversation_timeout_s = e.value("conversation_timeout_s", spec.conversation_timeout_s);
      if (ov.iterations) spec.iterations = *ov.iterations;
      if (ov.sleep_between_s) spec.sleep_between_s = *ov.sleep_between_s;
      if (ov.conversation_timeout_s) spec.conversation_timeout_s = *ov.conversation_timeout_s;

      const fs::path conv_path = relative_to(base, e.at("conversations").get<std::string>());
      spec.conversations_uri = conv_path.lexically_normal().string();
      if (!out.queue.conversations.count(spec.conversations_uri))
        out.queue.conversations[spec.conversations_uri] = load_conversations(conv_path);

      std::vector<core::GridPoint> points;
      if (e.contains("grid")) {
        if (e.contains("context_size") || e.contains("max_gen_length") || e.contains("batch_size"))
          throw Error(Errc::MalformedConfig, "experiment mixes a grid with scalar grid fields");
        points = core::expand_grid(e["grid"].get<core::GridSpec>());
      } else {
        points.push_back({e.value("context_size", spec.context_size), e.value("max_gen_length", spec.max_gen_length),
                          e.value("batch_size", spec.batch_size)});
      }
      for (const auto& p : points) {
        spec.context_size = p.context_size;
        spec.max_gen_length = p.max_gen_length;
        spec.batch_size = p.batch_size;
        for (auto& v : core::validate_spec(spec, out.queue.device)) out.warnings.push_back(std::move(v));
        out.queue.specs.push_back(spec);
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedConfig, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace melt::orchestrator
