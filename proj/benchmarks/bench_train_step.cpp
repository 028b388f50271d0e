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

#include <algorithm>
#include <vector>

#include "avcascade/dsp.hpp"
#include "avcascade/encoders.hpp"
#include "avcascade/graph.hpp"
#include "avcascade/loss.hpp"
#include "avcascade/rng.hpp"

namespace {

using avc::graph::Graph;
using avc::graph::Var;

struct Batch {
  std::vector<avc::dsp::MelSpectrogram> audio;
  std::vector<avc::enc::VisualFeatures> visual;
};

// Random clips of the given audio length; feature rates follow the
// one-2D-frame-per-second convention.
Batch make_batch(const avc::enc::EncoderConfig& cfg, std::size_t clips, std::size_t frames) {
  avc::CounterRng rng(7);
  Batch b;
  for (std::size_t i = 0; i < clips; ++i) {
    avc::dsp::MelSpectrogram m;
    m.frames = m.valid_frames = frames;
    m.bins = cfg.mel_bins;
    m.values.resize(frames * m.bins);
    for (auto& v : m.values) v = static_cast<float>(rng.normal());
    b.audio.push_back(std::move(m));

    avc::enc::VisualFeatures f;
    f.frames_2d = f.segments_3d = std::max<std::size_t>(1, frames / 100);
    f.dim_2d = cfg.dim_2d;
    f.dim_3d = cfg.dim_3d;
    f.values_2d.resize(f.frames_2d * f.dim_2d);
    f.values_3d.resize(f.segments_3d * f.dim_3d);
    for (auto& v : f.values_2d) v = static_cast<float>(rng.normal());
    for (auto& v : f.values_3d) v = static_cast<float>(rng.normal());
    b.visual.push_back(std::move(f));
  }
  return b;
}

void BM_AudioForward(benchmark::State& state) {
  const avc::enc::EncoderConfig cfg;
  const auto params = avc::enc::init_params(cfg, 1);
  const auto batch = make_batch(cfg, 1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avc::enc::embed_audio(batch.audio[0], params, cfg));
}
BENCHMARK(BM_AudioForward)->Arg(500)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

// One forward and backward pass through both encoders and the MMS loss.
void BM_TrainStep(benchmark::State& state) {
  const avc::enc::EncoderConfig cfg;
  const auto params = avc::enc::init_params(cfg, 1);
  const auto batch = make_batch(cfg, static_cast<std::size_t>(state.range(0)), 1000);
  for (auto _ : state) {
    Graph g;
    std::vector<Var> a, v;
    for (std::size_t i = 0; i < batch.audio.size(); ++i) {
      a.push_back(avc::enc::audio_forward(g, params, batch.audio[i], cfg));
      v.push_back(avc::enc::visual_forward(g, params, batch.visual[i], cfg, avc::enc::VisualMode::kVideo));
    }
    const Var scores = g.matmul_nt(g.stack_rows(a), g.stack_rows(v));
    benchmark::DoNotOptimize(g.backward(avc::loss::mms_loss(g, scores, {})));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
