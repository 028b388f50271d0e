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

#include "avcascade/optim.hpp"

#include <cmath>

#include "avcascade/error.hpp"

namespace avc::graph {

void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr) {
  require(lr >= 0.0 && std::isfinite(lr), ErrorCode::kInvalidArgument,
          "learning rate must be finite and non-negative");
  for (const auto& [name, g] : grads) {
    require(params.contains(name), ErrorCode::kContractViolation,
            "gradient for unknown parameter '" + name + "'");
    require(!params.frozen(name), ErrorCode::kContractViolation,
            "gradient supplied for frozen parameter '" + name + "'");
    require(g.shape() == params.value(name).shape(), ErrorCode::kShapeMismatch,
            "gradient shape " + shape_string(g.shape()) + " does not match parameter '" + name +
                "' " + shape_string(params.value(name).shape()));
  }
  for (const auto& [name, entry] : params.entries()) {
    if (!entry.frozen)
      require(grads.contains(name), ErrorCode::kContractViolation,
              "missing gradient for trainable parameter '" + name + "'");
  }

  const auto& cfg = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (const auto& [name, g] : grads) {
    Tensor& p = params.mutable_value(name);
    auto [mit, m_new] = state.first_moment.try_emplace(name, p.shape(), 0.0);
    auto [vit, v_new] = state.second_moment.try_emplace(name, p.shape(), 0.0);
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace avc::graph
