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

#include "avcascade/loss.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "avcascade/error.hpp"

namespace avc::loss {

MmsResult mms_loss(const Tensor& s, const MmsConfig& config) {
  require(s.rank() == 2 && s.dim(0) == s.dim(1), ErrorCode::kShapeMismatch,
          "mms_loss expects a square matrix, got " + shape_string(s.shape()));
  require(config.margin >= 0.0, ErrorCode::kInvalidArgument, "mms margin must be non-negative");
  const std::size_t n = s.dim(0);
  require(n >= 1, ErrorCode::kShapeMismatch, "mms_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  MmsResult out{0.0, Tensor(s.shape(), 0.0)};
  std::vector<double> logits(n);
  // direction 0 walks rows (audio -> visual), direction 1 walks columns.
  for (int direction = 0; direction < 2; ++direction) {
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t k = 0; k < n; ++k) {
        const double v = direction == 0 ? s.at(q, k) : s.at(k, q);
        logits[k] = k == q ? v - config.margin : v;
      }
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - mx);
      const double lse = mx + std::log(z);
      out.loss += (lse - logits[q]) * inv_n;
      for (std::size_t k = 0; k < n; ++k) {
        const double p = std::exp(logits[k] - lse);
        const double d = (p - (k == q ? 1.0 : 0.0)) * inv_n;
        if (direction == 0) out.grad.at(q, k) += d;
        else out.grad.at(k, q) += d;
      }
    }
  }
  require(std::isfinite(out.loss), ErrorCode::kNumerical, "mms_loss produced a non-finite value");
  return out;
}

MmsResult mms_loss(const enc::SimilarityMatrix& sim, const MmsConfig& config) {
  return mms_loss(sim.scores, config);
}

graph::Var mms_loss(graph::Graph& g, graph::Var scores, const MmsConfig& config) {
  MmsResult r = mms_loss(g.value(scores), config);
  return g.scalar_with_gradient(scores, r.loss, std::move(r.grad));
}

}  // namespace avc::loss
