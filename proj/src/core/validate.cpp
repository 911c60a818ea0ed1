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

#include "melt/core/validate.hpp"

#include <cstdio>

namespace melt::core {

double estimated_model_bytes(const ModelDescriptor& m, double overhead_factor) {
  return m.param_count * 1e9 * m.bitwidth / 8.0 * overhead_factor;
}

std::vector<Violation> validate_spec(const ExperimentSpec& spec, const DeviceDescriptor& device,
                                     const ValidationOptions& options) {
  std::vector<Violation> out;
  const double need = estimated_model_bytes(spec.model, options.memory_overhead_factor);
  const double have = static_cast<double>(device.mem_gb) * 1e9;
  if (need > have) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "insufficient memory: %s needs ~%.2f GB, %s has %lld GB", spec.model.name.c_str(),
                  need / 1e9, device.id.c_str(), static_cast<long long>(device.mem_gb));
    out.push_back({ViolationKind::InsufficientMemory, buf});
  }
  if (spec.iterations < 1) out.push_back({ViolationKind::ZeroIterations, "iterations must be at least 1"});
  if (spec.context_size <= 0 || spec.max_gen_length <= 0 || spec.batch_size <= 0)
    out.push_back({ViolationKind::InvalidGrid, "context, max_gen_length and batch_size must be positive"});
  if (spec.mode == Mode::Micro) {
    if (spec.max_gen_length != kMicroTokens)
      out.push_back({ViolationKind::MicroModeMismatch, "micro mode generates exactly 256 tokens; max_gen_length is " +
                                                           std::to_string(spec.max_gen_length)});
    if (spec.context_size < 2 * kMicroTokens)
      out.push_back({ViolationKind::MicroModeMismatch,
                     "micro mode needs a context of at least 512 tokens for 256 prefill + 256 generated"});
  }
  return out;
}

}  // namespace melt::core
