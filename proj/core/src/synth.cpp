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

#include "avcascade/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"
#include "avcascade/wav.hpp"

namespace avc::synth {

namespace {

std::size_t language_index(const SynthParams& p, const std::string& language) {
  auto it = std::find(p.languages.begin(), p.languages.end(), language);
  require(it != p.languages.end(), ErrorCode::kConfiguration,
          "synth: language '" + language + "' is not in the world's language list");
  return static_cast<std::size_t>(it - p.languages.begin());
}

std::string format_index(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

void SynthParams::validate(const dsp::DspParams& dsp) const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kConfiguration, "synth: " + what); };
  if (num_videos == 0 || clips_per_video == 0) bad("num_videos and clips_per_video must be positive");
  if (!(clip_duration_s > 0.0)) bad("clip_duration_s must be positive");
  if (num_concepts < 2) bad("num_concepts must be >= 2");
  if (!(shared_concept_fraction >= 0.0 && shared_concept_fraction <= 1.0))
    bad("shared_concept_fraction must be in [0, 1]");
  if (!(noise_sigma >= 0.0)) bad("noise_sigma must be non-negative");
  if (feature_dim_2d == 0 || feature_dim_3d == 0) bad("feature dims must be positive");
  if (tones_per_concept == 0) bad("tones_per_concept must be positive");
  if (variants_per_concept == 0) bad("variants_per_concept must be positive");
  if (!(tone_amplitude > 0.0)) bad("tone_amplitude must be positive");
  if (languages.empty()) bad("languages must be non-empty");
  if (sample_rate_hz != dsp.sample_rate_hz) bad("sample_rate_hz must match the front-end rate");
  if (!(tone_fmin_hz > dsp.fmin_hz && tone_fmax_hz < dsp.fmax_hz && tone_fmin_hz < tone_fmax_hz))
    bad("tone frequency range must lie strictly inside (fmin_hz, fmax_hz)");
  if (tone_fmax_hz >= sample_rate_hz / 2.0) bad("tone_fmax_hz at or above Nyquist");
  language_index(*this, language);
}

bool ConceptCodebook::is_shared(std::size_t c) const {
  return std::binary_search(shared.begin(), shared.end(), c);
}

std::size_t ConceptCodebook::variants() const {
  return tones.empty() || tones.begin()->second.empty() ? 0 : tones.begin()->second.front().size();
}

const ConceptCodebook::ToneSet& ConceptCodebook::variant_tones(const std::string& language, std::size_t c,
                                                               std::size_t variant) const {
  auto it = tones.find(language);
  require(it != tones.end(), ErrorCode::kInvalidArgument, "codebook has no language '" + language + "'");
  require(c < it->second.size(), ErrorCode::kInvalidArgument, "concept index out of range");
  require(variant < it->second[c].size(), ErrorCode::kInvalidArgument, "variant index out of range");
  return it->second[c][variant];
}

std::vector<double> ConceptCodebook::concept_tones(const std::string& language, std::size_t c) const {
  std::vector<double> out;
  for (std::size_t v = 0; v < variants(); ++v) {
    const auto& t = variant_tones(language, c, v);
    out.insert(out.end(), t.begin(), t.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConceptCodebook build_codebook(const SynthParams& p) {
  p.validate();
  const std::size_t C = p.num_concepts;
  const std::size_t K = p.tones_per_concept;
  const std::size_t L = p.languages.size();
  const auto n_shared = static_cast<std::size_t>(std::llround(p.shared_concept_fraction * static_cast<double>(C)));
  const std::size_t n_private = C - n_shared;
  const std::size_t spare_sets = L > 1 ? L - 1 : 0;
  const std::size_t P = p.variants_per_concept;
  const std::size_t sets = C + spare_sets;
  const std::size_t slots = sets * P * K;

  // Slot grid is uniform in mel; the seeded permutation decides which slots
  // each tone set gets.
  const double lo = dsp::hz_to_mel(p.tone_fmin_hz);
  const double hi = dsp::hz_to_mel(p.tone_fmax_hz);
  std::vector<double> slot_hz(slots);
  for (std::size_t s = 0; s < slots; ++s)
    slot_hz[s] = dsp::mel_to_hz(lo + (hi - lo) * (static_cast<double>(s) + 0.5) / static_cast<double>(slots));
  std::vector<std::size_t> perm(slots);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng slot_rng(p.seed, fnv1a64("codebook.slots"));
  slot_rng.shuffle(std::span<std::size_t>(perm));
  using Sound = std::vector<ConceptCodebook::ToneSet>;
  std::vector<Sound> base(sets, Sound(P));
  for (std::size_t i = 0; i < sets; ++i) {
    for (std::size_t v = 0; v < P; ++v) {
      auto& t = base[i][v];
      for (std::size_t k = 0; k < K; ++k) t.push_back(slot_hz[perm[(i * P + v) * K + k]]);
      std::sort(t.begin(), t.end());
    }
  }

  std::vector<std::size_t> concepts(C);
  std::iota(concepts.begin(), concepts.end(), std::size_t{0});
  CounterRng shared_rng(p.seed, fnv1a64("codebook.shared"));
  shared_rng.shuffle(std::span<std::size_t>(concepts));

  ConceptCodebook book;
  book.languages = p.languages;
  book.shared.assign(concepts.begin(), concepts.begin() + static_cast<std::ptrdiff_t>(n_shared));
  std::sort(book.shared.begin(), book.shared.end());
  std::vector<std::size_t> priv;
  for (std::size_t c = 0; c < C; ++c)
    if (!book.is_shared(c)) priv.push_back(c);

  for (std::size_t li = 0; li < L; ++li) {
    std::vector<Sound> table(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(C));
    if (li > 0 && n_private == 1) {
      table[priv[0]] = base[C + li - 1];
    } else if (li > 0 && n_private >= 2) {
      require(li % n_private != 0, ErrorCode::kConfiguration,
              "synth: too many languages for " + std::to_string(n_private) + " non-shared concepts");
      for (std::size_t i = 0; i < n_private; ++i) table[priv[i]] = base[priv[(i + li) % n_private]];
    }
    book.tones.emplace(p.languages[li], std::move(table));
  }
  return book;
}

VisualWorld build_visual_world(const SynthParams& p) {
  VisualWorld w{Tensor(Shape{p.num_concepts, p.feature_dim_2d}), Tensor(Shape{p.num_concepts, p.feature_dim_3d})};
  CounterRng rng2(p.seed, fnv1a64("world.centroids_2d"));
  for (double& v : w.centroids_2d.values()) v = rng2.normal();
  CounterRng rng3(p.seed, fnv1a64("world.centroids_3d"));
  for (double& v : w.centroids_3d.values()) v = rng3.normal();
  return w;
}

SynthWorld build_world(const SynthParams& params) {
  return SynthWorld{params, build_codebook(params), build_visual_world(params)};
}

namespace {

CounterRng clip_stream(const SynthParams& p, std::size_t index) {
  return CounterRng(derive_seed(p.seed, "clips/" + p.effective_corpus_name()), index);
}

}  // namespace

std::size_t clip_concept(const SynthParams& p, std::size_t index) {
  CounterRng rng = clip_stream(p, index);
  return static_cast<std::size_t>(rng.below(p.num_concepts));
}

corpus::ClipRecord clip_record(const SynthParams& p, std::size_t index) {
  require(index < p.num_videos * p.clips_per_video, ErrorCode::kInvalidArgument,
          "synth: clip index out of range");
  const std::size_t v = index / p.clips_per_video;
  const std::size_t k = index % p.clips_per_video;
  corpus::ClipRecord rec;
  rec.video_id = p.effective_corpus_name() + format_index("-v", v, 4);
  rec.clip_id = rec.video_id + format_index("-c", k, 2);
  rec.start_s = static_cast<double>(k) * p.clip_duration_s;
  rec.end_s = static_cast<double>(k + 1) * p.clip_duration_s;
  rec.language = p.language;
  rec.audio_path = "audio/" + rec.clip_id + ".wav";
  rec.visual_feature_path = "visual/" + rec.clip_id + ".vfea";
  return rec;
}

SyntheticClip render_clip(const SynthWorld& world, std::size_t index) {
  const SynthParams& p = world.params;
  SyntheticClip clip;
  clip.record = clip_record(p, index);
  CounterRng rng = clip_stream(p, index);
  const auto c = static_cast<std::size_t>(rng.below(p.num_concepts));
  const auto variant = static_cast<std::size_t>(rng.below(p.variants_per_concept));
  clip.concept_index = c;

  const auto samples = static_cast<std::size_t>(std::llround(p.clip_duration_s * p.sample_rate_hz));
  const std::size_t frames_2d = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p.clip_duration_s)));
  const std::size_t segments_3d =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p.clip_duration_s / 2.0)));
  const double audio_sigma = p.noise_sigma * p.tone_amplitude;

  std::vector<double> acc(samples, 0.0);
  for (double f : world.codebook.variant_tones(p.language, c, variant)) {
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double w = 2.0 * std::numbers::pi * f / p.sample_rate_hz;
    for (std::size_t i = 0; i < samples; ++i)
      acc[i] += p.tone_amplitude * std::sin(w * static_cast<double>(i) + phase);
  }
  clip.audio.sample_rate = p.sample_rate_hz;
  clip.audio.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double noisy = acc[i] + (audio_sigma > 0.0 ? audio_sigma * rng.normal() : 0.0);
    clip.audio.samples[i] = dsp::quantize_pcm16(static_cast<float>(noisy));
  }

  enc::VisualFeatures& feat = clip.visual;
  feat.frames_2d = frames_2d;
  feat.dim_2d = p.feature_dim_2d;
  feat.segments_3d = segments_3d;
  feat.dim_3d = p.feature_dim_3d;
  feat.values_2d.resize(frames_2d * p.feature_dim_2d);
  feat.values_3d.resize(segments_3d * p.feature_dim_3d);
  for (std::size_t t = 0; t < frames_2d; ++t)
    for (std::size_t j = 0; j < p.feature_dim_2d; ++j)
      feat.values_2d[t * p.feature_dim_2d + j] =
          static_cast<float>(world.visual.centroids_2d.at(c, j) + p.noise_sigma * rng.normal());
  for (std::size_t t = 0; t < segments_3d; ++t)
    for (std::size_t j = 0; j < p.feature_dim_3d; ++j)
      feat.values_3d[t * p.feature_dim_3d + j] =
          static_cast<float>(world.visual.centroids_3d.at(c, j) + p.noise_sigma * rng.normal());
  return clip;
}

corpus::CorpusManifest generate_manifest(const SynthParams& p) {
  p.validate();
  const ConceptCodebook book = build_codebook(p);
  corpus::CorpusManifest m;
  m.language = p.language;
  nlohmann::json concept_of = nlohmann::json::object();
  const std::size_t total = p.num_videos * p.clips_per_video;
  m.records.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    m.records.push_back(clip_record(p, i));
    concept_of[m.records.back().clip_id] = clip_concept(p, i);
  }
  m.metadata = {
      {std::string(corpus::kAudioLayoutKey), "per_clip"},
      {"generator", "synth"},
      {"corpus_name", p.effective_corpus_name()},
      {"world_seed", p.seed},
      {"num_concepts", p.num_concepts},
      {"shared_concept_fraction", p.shared_concept_fraction},
      {"noise_sigma", p.noise_sigma},
      {"variants_per_concept", p.variants_per_concept},
      {"clip_duration_s", p.clip_duration_s},
      {"languages", p.languages},
      {"shared_concepts", book.shared},
      {"concept_of", std::move(concept_of)},
  };
  return m;
}

SyntheticCorpus generate_corpus(const SynthParams& p) {
  const SynthWorld world = build_world(p);
  SyntheticCorpus out;
  out.manifest = generate_manifest(p);
  const std::size_t total = out.manifest.records.size();
  out.audio.reserve(total);
  out.visual.reserve(total);
  out.concepts.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    SyntheticClip clip = render_clip(world, i);
    out.audio.push_back(std::move(clip.audio));
    out.visual.push_back(std::move(clip.visual));
    out.concepts.push_back(clip.concept_index);
  }
  return out;
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                  const std::string& manifest_name) {
  for (std::size_t i = 0; i < corpus.manifest.records.size(); ++i) {
    const auto& rec = corpus.manifest.records[i];
    dsp::write_wav(dir / rec.audio_path, corpus.audio[i]);
    enc::write_visual_file(dir / rec.visual_feature_path, corpus.visual[i]);
  }
  corpus::write_manifest(dir / manifest_name, corpus.manifest);
}

}  // namespace avc::synth
