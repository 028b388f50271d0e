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

#include <algorithm>
#include <numeric>
#include <vector>

#include "avcascade/metrics.hpp"
#include "avcascade/tensor.hpp"

namespace avc::testing {

/// Rank of every query's counterpart by fully sorting its gallery: score
/// descending, and among equal scores the counterpart goes last.
inline std::vector<std::size_t> full_sort_ranks(const Tensor& s, eval::Direction direction) {
  const std::size_t n = s.dim(0);
  std::vector<std::size_t> ranks(n);
  for (std::size_t q = 0; q < n; ++q) {
    auto score = [&](std::size_t j) {
      return direction == eval::Direction::kAudioToVisual ? s.at(q, j) : s.at(j, q);
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (score(a) != score(b)) return score(a) > score(b);
      if ((a == q) != (b == q)) return b == q;
      return a < b;
    });
    ranks[q] = static_cast<std::size_t>(std::find(order.begin(), order.end(), q) - order.begin()) + 1;
  }
  return ranks;
}

inline double oracle_recall(const std::vector<std::size_t>& ranks, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r : ranks) hits += r <= k;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

inline double oracle_median(std::vector<std::size_t> ranks) {
  std::sort(ranks.begin(), ranks.end());
  const std::size_t n = ranks.size();
  return n % 2 ? static_cast<double>(ranks[n / 2]) : (ranks[n / 2 - 1] + ranks[n / 2]) / 2.0;
}

/// Square matrix whose entries come from a small integer alphabet when
/// tie_levels > 0 (lots of ties) or are continuous otherwise.
template <typename Rng>
Tensor random_score_matrix(std::size_t n, Rng& rng, std::size_t tie_levels) {
  Tensor s(Shape{n, n});
  for (double& v : s.values())
    v = tie_levels ? static_cast<double>(rng.below(tie_levels)) : rng.normal();
  return s;
}

}  // namespace avc::testing
