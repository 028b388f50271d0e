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

#include "avcascade/benchmark.hpp"

namespace avc::train {

BenchmarkSpec BenchmarkSpec::defaults(std::uint64_t seed) {
  BenchmarkSpec b;
  b.seed = seed;

  synth::SynthParams& s = b.source;
  s.num_videos = 400;
  s.clips_per_video = 8;
  s.num_concepts = 32;
  s.variants_per_concept = 32;
  s.tones_per_concept = 3;
  s.noise_sigma = 0.1;
  s.shared_concept_fraction = 0.3;
  s.language = "en";
  s.corpus_name = "source";
  s.seed = seed;

  b.target = s;
  b.target.num_videos = 40;
  b.target.language = "ja";
  b.target.corpus_name = "target";

  b.extra = s;
  b.extra.num_videos = 40;
  b.extra.corpus_name = "extra";

  // The small corpora keep a larger test share so the gallery holds
  // 14 videos x 8 clips = 112 clips.
  b.source_splits = {0.7, 0.15, 0.15};
  b.target_splits = {0.55, 0.10, 0.35};

  // Full-scale batches (128 x 32) need more videos than the whole source
  // corpus; the desk-scale stage keeps the same video-major structure.
  StageConfig& p = b.cascade.pretrain;
  p.videos_per_batch = 8;
  p.clips_per_video = 8;
  p.lr = 1e-3;
  p.epochs = 15;
  p.seed = seed;

  StageConfig& f = b.cascade.finetune;
  f.flat_batch_clips = 32;
  f.lr = 1e-4;
  f.epochs = 30;
  f.seed = seed;

  b.cascade.scratch = f;
  return b;
}

namespace {

corpus::CorpusManifest split(const SynthClipSource& clips, const corpus::SplitFractions& fractions,
                             std::uint64_t seed) {
  return corpus::build_splits(clips.manifest(), fractions, seed);
}

}  // namespace

Benchmark::Benchmark(const BenchmarkSpec& spec)
    : spec_(spec),
      source_clips_(spec.source),
      target_clips_(spec.target),
      extra_clips_(spec.extra),
      source_manifest_(split(source_clips_, spec.source_splits, spec.seed)),
      target_manifest_(split(target_clips_, spec.target_splits, spec.seed)),
      extra_manifest_(split(extra_clips_, spec.target_splits, spec.seed)) {}

}  // namespace avc::train
