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
#include <string>
#include <vector>

#include "avcascade/checkpoint.hpp"
#include "avcascade/corpus.hpp"
#include "avcascade/dataset.hpp"
#include "avcascade/metrics.hpp"

namespace avc::eval {

struct EvalOptions {
  /// Label stored in the reports, e.g. "zero_shot".
  std::string model;
  std::string corpus_id;
  std::string split = "test";
  /// Image-style corpora are scored on a fixed seeded subset of this many
  /// clips when the split is larger.
  std::size_t image_gallery_cap = 1000;
  std::uint64_t subset_seed = 0;
};

/// Scores pre-computed embeddings (row i of audio pairs with row i of
/// visual). This is also the seam tests use to inject oracle embeddings.
ReportPair evaluate_embeddings(const Tensor& audio, const Tensor& visual);

/// Embeds every clip of split with the checkpoint and reports both
/// directions over the full n x n similarity matrix.
ReportPair evaluate(const train::Checkpoint& ckpt, const corpus::CorpusManifest& split,
                    const train::ClipSource& source, enc::VisualMode mode, const EvalOptions& options);

/// Records evaluate() scores: split itself, or the seeded image-mode subset.
std::vector<corpus::ClipRecord> gallery_records(const corpus::CorpusManifest& split, enc::VisualMode mode,
                                                const EvalOptions& options);

}  // namespace avc::eval
