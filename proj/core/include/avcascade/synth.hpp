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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avcascade/corpus.hpp"
#include "avcascade/dsp.hpp"
#include "avcascade/tensor.hpp"
#include "avcascade/visual_features.hpp"

namespace avc::synth {

/// Knobs of the synthetic bilingual world.
///
/// seed fixes the world: concept centroids and the tone codebook. corpus_name
/// keys the per-clip draws, so two corpora in the same world and language
/// (say a pretraining set and a held-out set) still contain different clips.
struct SynthParams {
  std::size_t num_videos = 40;
  std::size_t clips_per_video = 8;
  double clip_duration_s = 5.0;
  std::size_t num_concepts = 16;
  double shared_concept_fraction = 0.3;
  /// Visual noise std-dev (centroids are unit-variance) and audio noise
  /// relative to tone_amplitude.
  double noise_sigma = 0.5;
  std::string language = "en";
  /// Languages of the world, in codebook order; language must be one of them.
  std::vector<std::string> languages = {"en", "ja"};
  std::size_t feature_dim_2d = 32;
  std::size_t feature_dim_3d = 16;
  std::uint64_t seed = 0;

  std::string corpus_name;  // defaults to language
  std::size_t tones_per_concept = 2;
  /// Distinct renditions ("speakers") of every concept sound; each clip
  /// picks one. Variants of one concept share no tones with each other or
  /// with any other concept.
  std::size_t variants_per_concept = 1;
  double tone_amplitude = 0.2;
  double tone_fmin_hz = 150.0;
  double tone_fmax_hz = 7000.0;
  std::uint32_t sample_rate_hz = 16000;

  void validate(const dsp::DspParams& dsp = {}) const;
  std::string effective_corpus_name() const { return corpus_name.empty() ? language : corpus_name; }
};

/// Concept -> tone frequencies, per language.
///
/// Shared concepts sound the same in every language. Every other concept
/// borrows, in language k of the world, the sound of the non-shared concept
/// k places later in index order, so each language uses the same sound
/// inventory with different meanings.
struct ConceptCodebook {
  using ToneSet = std::vector<double>;
  std::vector<std::string> languages;
  std::vector<std::size_t> shared;  // sorted concept indices
  /// language -> concept -> variant -> Hz
  std::map<std::string, std::vector<std::vector<ToneSet>>> tones;

  bool is_shared(std::size_t concept_index) const;
  std::size_t variants() const;
  /// Every frequency the concept uses in language, sorted.
  std::vector<double> concept_tones(const std::string& language, std::size_t concept_index) const;
  const ToneSet& variant_tones(const std::string& language, std::size_t concept_index, std::size_t variant) const;
};

ConceptCodebook build_codebook(const SynthParams& params);

/// Visual centroids of the world: [C, D2] and [C, D3].
struct VisualWorld {
  Tensor centroids_2d;
  Tensor centroids_3d;
};
VisualWorld build_visual_world(const SynthParams& params);

struct SyntheticClip {
  corpus::ClipRecord record;
  dsp::Waveform audio;
  enc::VisualFeatures visual;
  std::size_t concept_index = 0;
};

/// Shared, read-only state for rendering clips of one corpus.
struct SynthWorld {
  SynthParams params;
  ConceptCodebook codebook;
  VisualWorld visual;
};
SynthWorld build_world(const SynthParams& params);

/// Record and ground-truth concept of clip `index` (video-major order),
/// without rendering audio.
corpus::ClipRecord clip_record(const SynthParams& params, std::size_t index);
std::size_t clip_concept(const SynthParams& params, std::size_t index);

/// Renders one clip. Each clip draws from its own counter-based stream, so
/// clips can be produced in any order or in parallel with identical results.
SyntheticClip render_clip(const SynthWorld& world, std::size_t index);

/// Manifest of the corpus generate_corpus() would produce, without audio.
corpus::CorpusManifest generate_manifest(const SynthParams& params);

struct SyntheticCorpus {
  corpus::CorpusManifest manifest;
  std::vector<dsp::Waveform> audio;         // aligned with manifest.records
  std::vector<enc::VisualFeatures> visual;  // aligned with manifest.records
  std::vector<std::size_t> concepts;        // ground truth, diagnostics only
};

/// Renders a corpus in memory. Audio samples sit on 16-bit PCM levels so
/// writing and re-reading WAV files is lossless.
SyntheticCorpus generate_corpus(const SynthParams& params);

/// Writes audio/<clip>.wav, visual/<clip>.vfea and the manifest under dir.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                  const std::string& manifest_name = "manifest.jsonl");

}  // namespace avc::synth
