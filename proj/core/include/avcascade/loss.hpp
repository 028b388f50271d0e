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

#include "avcascade/encoders.hpp"
#include "avcascade/graph.hpp"
#include "avcascade/tensor.hpp"

namespace avc::loss {

struct MmsConfig {
  /// Subtracted from every positive (diagonal) score.
  double margin = 0.001;
};

struct MmsResult {
  double loss = 0.0;
  Tensor grad;  // d loss / d S, same shape as S
};

/// Bidirectional masked-margin softmax over a square score matrix whose
/// diagonal holds the positive pairs:
///
///   L = 1/B sum_i -log( e^{S_ii - m} / (e^{S_ii - m} + sum_{j != i} e^{S_ij}) )
///     + 1/B sum_j -log( e^{S_jj - m} / (e^{S_jj - m} + sum_{i != j} e^{S_ij}) )
///
/// Every off-diagonal entry is a negative, including pairs from the same
/// video. Log-sum-exp is stabilized per row and column.
MmsResult mms_loss(const Tensor& scores, const MmsConfig& config);
MmsResult mms_loss(const enc::SimilarityMatrix& sim, const MmsConfig& config);

/// Records the loss on g as a scalar whose backward pass uses the analytic
/// gradient above.
graph::Var mms_loss(graph::Graph& g, graph::Var scores, const MmsConfig& config);

}  // namespace avc::loss
