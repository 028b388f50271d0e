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


#include <benchmark/benchmark.h>

#include "avcascade/loss.hpp"
#include "avcascade/metrics.hpp"
#include "avcascade/rng.hpp"
#include "avcascade/tensor.hpp"

namespace {

avc::Tensor random_scores(std::size_t n) {
  avc::CounterRng rng(3);
  avc::Tensor t(avc::Shape{n, n});
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.normal();
  return t;
}

void BM_Reports(benchmark::State& state) {
  const auto scores = random_scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avc::eval::make_reports(scores));
}
BENCHMARK(BM_Reports)->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MmsLoss(benchmark::State& state) {
  const auto scores = random_scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avc::loss::mms_loss(scores, {}));
}
BENCHMARK(BM_MmsLoss)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
