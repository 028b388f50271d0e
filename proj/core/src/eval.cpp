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

#include "avcascade/eval.hpp"

#include <algorithm>

#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

namespace avc::eval {

ReportPair evaluate_embeddings(const Tensor& audio, const Tensor& visual) {
  return make_reports(enc::similarity_matrix(audio, visual).scores);
}

std::vector<corpus::ClipRecord> gallery_records(const corpus::CorpusManifest& split, enc::VisualMode mode,
                                                const EvalOptions& options) {
  require(!split.records.empty(), ErrorCode::kEmptySplit, "cannot evaluate on an empty split");
  if (mode != enc::VisualMode::kImage || options.image_gallery_cap == 0 ||
      split.records.size() <= options.image_gallery_cap)
    return split.records;
  std::vector<std::size_t> order(split.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  CounterRng rng(derive_seed(options.subset_seed, "eval.image_subset"));
  rng.shuffle(std::span(order));
  order.resize(options.image_gallery_cap);
  std::sort(order.begin(), order.end());
  std::vector<corpus::ClipRecord> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(split.records[i]);
  return out;
}

ReportPair evaluate(const train::Checkpoint& ckpt, const corpus::CorpusManifest& split,
                    const train::ClipSource& source, enc::VisualMode mode, const EvalOptions& options) {
  const auto records = gallery_records(split, mode, options);
  require(source.dsp().mel_bins == ckpt.encoder.mel_bins, ErrorCode::kShapeMismatch,
          "checkpoint expects " + std::to_string(ckpt.encoder.mel_bins) + " mel bins, corpus front end has " +
              std::to_string(source.dsp().mel_bins));
  const auto first = source.visual(records.front());
  require(first->dim_2d == ckpt.encoder.dim_2d &&
              (mode == enc::VisualMode::kImage || first->dim_3d == ckpt.encoder.dim_3d),
          ErrorCode::kShapeMismatch, "checkpoint visual dimensions do not match the corpus features");
  const train::Embeddings e = train::embed_records(ckpt.params, ckpt.encoder, mode, records, source);
  ReportPair out = evaluate_embeddings(e.audio, e.visual);
  const std::string id = train::checkpoint_id(ckpt);
  for (RetrievalReport* r : {&out.audio_to_visual, &out.visual_to_audio}) {
    r->model = options.model;
    r->checkpoint_id = id;
    r->corpus_id = options.corpus_id;
    r->split = options.split;
  }
  return out;
}

}  // namespace avc::eval
