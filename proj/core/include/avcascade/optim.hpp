// Copyright 2026 The avcascade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "avcascade/graph.hpp"

namespace avc::graph {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment estimates for every parameter that has received a gradient.
struct AdamState {
  AdamConfig config;
  std::map<std::string, Tensor, std::less<>> first_moment;
  std::map<std::string, Tensor, std::less<>> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
/// grads must name exactly the non-frozen parameters. Frozen parameters are
/// never touched.
void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr);

}  // namespace avc::graph
