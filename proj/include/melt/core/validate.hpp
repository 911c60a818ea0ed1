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

#include <string>
#include <vector>

#include "melt/core/types.hpp"

namespace melt::core {

enum class ViolationKind { InsufficientMemory, MicroModeMismatch, ZeroIterations, InvalidGrid };

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationOptions {
  // Multiplier on weight bytes covering KV cache and activations.
  double memory_overhead_factor = 1.4;
};

/// Estimated resident bytes: param_count (billions) * bitwidth / 8 * overhead.
double estimated_model_bytes(const ModelDescriptor& m, double overhead_factor);

/// Pre-flight heuristics. An empty result means the spec looks runnable on
/// `device`; violations are warnings and never block a run.
std::vector<Violation> validate_spec(const ExperimentSpec& spec, const DeviceDescriptor& device,
                                     const ValidationOptions& options = {});

}  // namespace melt::core
