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

#include "avcascade/dataset.hpp"

#include <cmath>

#include "avcascade/error.hpp"
#include "avcascade/wav.hpp"

namespace avc::train {

FileClipSource::FileClipSource(std::filesystem::path base_dir, const corpus::CorpusManifest& manifest,
                               dsp::DspParams dsp)
    : base_(std::move(base_dir)), per_video_(manifest.per_video_audio()), dsp_(dsp) {
  dsp_.validate();
}

SpectrogramPtr FileClipSource::spectrogram(const corpus::ClipRecord& record) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = spectrograms_.find(record.clip_id); it != spectrograms_.end()) return it->second;
  }
  dsp::Waveform wave = dsp::normalize_audio(dsp::read_wav(base_ / record.audio_path), dsp_.sample_rate_hz);
  if (per_video_) {
    const auto first = static_cast<std::size_t>(std::llround(record.start_s * wave.sample_rate));
    const auto last = static_cast<std::size_t>(std::llround(record.end_s * wave.sample_rate));
    require(first < last && last <= wave.samples.size(), ErrorCode::kCorruptAudio,
            "clip " + record.clip_id + " lies outside its audio file " + record.audio_path);
    wave.samples = std::vector<float>(wave.samples.begin() + static_cast<std::ptrdiff_t>(first),
                                      wave.samples.begin() + static_cast<std::ptrdiff_t>(last));
  }
  auto spec = std::make_shared<const dsp::MelSpectrogram>(dsp::log_mel(wave, dsp_));
  std::lock_guard lock(mu_);
  return spectrograms_.emplace(record.clip_id, std::move(spec)).first->second;
}

VisualPtr FileClipSource::visual(const corpus::ClipRecord& record) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = visuals_.find(record.clip_id); it != visuals_.end()) return it->second;
  }
  auto feat = std::make_shared<const enc::VisualFeatures>(
      enc::read_visual_file(base_ / record.visual_feature_path));
  std::lock_guard lock(mu_);
  return visuals_.emplace(record.clip_id, std::move(feat)).first->second;
}

SynthClipSource::SynthClipSource(const synth::SynthParams& params, dsp::DspParams dsp)
    : world_(synth::build_world(params)), manifest_(synth::generate_manifest(params)), dsp_(dsp) {
  dsp_.validate();
  for (std::size_t i = 0; i < manifest_.records.size(); ++i) index_.emplace(manifest_.records[i].clip_id, i);
}

const SynthClipSource::Entry& SynthClipSource::entry(const corpus::ClipRecord& record) const {
  auto it = index_.find(record.clip_id);
  require(it != index_.end(), ErrorCode::kInvalidArgument,
          "clip " + record.clip_id + " is not part of this synthetic corpus");
  {
    std::lock_guard lock(mu_);
    if (auto c = cache_.find(it->second); c != cache_.end()) return c->second;
  }
  synth::SyntheticClip clip = synth::render_clip(world_, it->second);
  Entry e{std::make_shared<const dsp::MelSpectrogram>(dsp::log_mel(clip.audio, dsp_)),
          std::make_shared<const enc::VisualFeatures>(std::move(clip.visual))};
  std::lock_guard lock(mu_);
  return cache_.emplace(it->second, std::move(e)).first->second;
}

SpectrogramPtr SynthClipSource::spectrogram(const corpus::ClipRecord& record) const {
  return entry(record).spectrogram;
}

VisualPtr SynthClipSource::visual(const corpus::ClipRecord& record) const { return entry(record).visual; }

Embeddings embed_records(const graph::ParamSet& params, const enc::EncoderConfig& config,
                         enc::VisualMode mode, std::span<const corpus::ClipRecord> records,
                         const ClipSource& source) {
  enc::check_params(params, config);
  const std::size_t n = records.size();
  const std::size_t d = config.embed_dim;
  Embeddings out{Tensor(Shape{n, d}), Tensor(Shape{n, d}), {}, {}};
  out.video_ids.reserve(n);
  out.clip_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    // The encoder reads only the valid prefix, so fitting to the maximum
    // length matters just for clips that are too long or too short.
    const SpectrogramPtr spec = source.spectrogram(rec);
    const bool fits = spec->frames >= config.min_frames() && spec->frames <= source.dsp().max_frames();
    const auto a = enc::embed_audio(fits ? *spec : dsp::fit_length(*spec, source.dsp()), params, config);
    const auto v = enc::embed_visual(*source.visual(rec), params, config, mode);
    std::copy(a.begin(), a.end(), out.audio.data() + i * d);
    std::copy(v.begin(), v.end(), out.visual.data() + i * d);
    out.video_ids.push_back(rec.video_id);
    out.clip_ids.push_back(rec.clip_id);
  }
  return out;
}

}  // namespace avc::train
