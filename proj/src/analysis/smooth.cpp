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

#include "melt/analysis/smooth.hpp"

#include <algorithm>

#include "melt/core/error.hpp"

namespace melt::analysis {

std::vector<double> smooth(std::span<const double> x, std::size_t window_n) {
  if (window_n == 0) throw Error(Errc::InvalidArgument, "smoothing window must be at least 1");
  const std::size_t n = x.size();
  std::vector<double> out(n);
  if (window_n == 1) {
    std::copy(x.begin(), x.end(), out.begin());
    return out;
  }
  // Running Kahan sum over the sliding window.
  const std::size_t lo_half = (window_n - 1) / 2;
  const std::size_t hi_half = window_n / 2;
  double sum = 0, comp = 0;
  auto add = [&](double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  std::size_t lo = 0, hi = 0;  // current window [lo, hi)
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want_lo = i > lo_half ? i - lo_half : 0;
    const std::size_t want_hi = std::min(n, i + hi_half + 1);
    while (hi < want_hi) add(x[hi++]);
    while (lo < want_lo) add(-x[lo++]);
    out[i] = sum / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace melt::analysis
