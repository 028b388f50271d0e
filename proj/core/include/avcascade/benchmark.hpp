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

#include "avcascade/cascade.hpp"
#include "avcascade/corpus.hpp"
#include "avcascade/dataset.hpp"
#include "avcascade/synth.hpp"

namespace avc::train {

/// The desk-scale bilingual benchmark: a large source-language corpus, a
/// small target-language corpus and a second small source-language corpus
/// of the same size as the target, all in one synthetic world.
struct BenchmarkSpec {
  synth::SynthParams source;
  synth::SynthParams target;
  synth::SynthParams extra;
  corpus::SplitFractions source_splits;
  corpus::SplitFractions target_splits;
  CascadeConfig cascade;
  std::uint64_t seed = 0;

  /// 400 x 8 source clips ("en"), 40 x 8 target clips ("ja"), rho = 0.3.
  static BenchmarkSpec defaults(std::uint64_t seed);
};

/// Owns the clip sources and split manifests of a BenchmarkSpec.
class Benchmark {
 public:
  explicit Benchmark(const BenchmarkSpec& spec);
  Benchmark(const Benchmark&) = delete;
  Benchmark& operator=(const Benchmark&) = delete;

  const BenchmarkSpec& spec() const noexcept { return spec_; }
  CorpusInput source() const { return {&source_manifest_, &source_clips_, "source"}; }
  CorpusInput target() const { return {&target_manifest_, &target_clips_, "target"}; }
  CorpusInput extra() const { return {&extra_manifest_, &extra_clips_, "extra"}; }

 private:
  BenchmarkSpec spec_;
  SynthClipSource source_clips_;
  SynthClipSource target_clips_;
  SynthClipSource extra_clips_;
  corpus::CorpusManifest source_manifest_;
  corpus::CorpusManifest target_manifest_;
  corpus::CorpusManifest extra_manifest_;
};

}  // namespace avc::train
