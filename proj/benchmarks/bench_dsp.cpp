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

#include <cmath>

#include "avcascade/dsp.hpp"
#include "avcascade/rng.hpp"

namespace {

avc::dsp::Waveform noise(double seconds) {
  avc::dsp::Waveform w;
  w.samples.resize(static_cast<std::size_t>(seconds * w.sample_rate));
  avc::CounterRng rng(1);
  for (auto& s : w.samples) s = static_cast<float>(0.1 * rng.normal());
  return w;
}

void BM_LogMel(benchmark::State& state) {
  const auto wave = noise(static_cast<double>(state.range(0)));
  const avc::dsp::DspParams params;
  for (auto _ : state) benchmark::DoNotOptimize(avc::dsp::log_mel(wave, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(wave.samples.size()));
}
BENCHMARK(BM_LogMel)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FitLength(benchmark::State& state) {
  const avc::dsp::DspParams params;
  const auto spec = avc::dsp::log_mel(noise(12.0), params);
  for (auto _ : state) benchmark::DoNotOptimize(avc::dsp::fit_length(spec, params));
}
BENCHMARK(BM_FitLength);

}  // namespace
