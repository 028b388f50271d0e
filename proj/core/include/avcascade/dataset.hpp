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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "avcascade/corpus.hpp"
#include "avcascade/dsp.hpp"
#include "avcascade/encoders.hpp"
#include "avcascade/synth.hpp"
#include "avcascade/visual_features.hpp"

namespace avc::train {

using SpectrogramPtr = std::shared_ptr<const dsp::MelSpectrogram>;
using VisualPtr = std::shared_ptr<const enc::VisualFeatures>;

/// Supplies the model inputs of a clip: its full log-mel spectrogram (not
/// length-fitted) and its visual features. Implementations cache and are
/// safe to call from several threads.
class ClipSource {
 public:
  virtual ~ClipSource() = default;
  virtual SpectrogramPtr spectrogram(const corpus::ClipRecord& record) const = 0;
  virtual VisualPtr visual(const corpus::ClipRecord& record) const = 0;
  virtual const dsp::DspParams& dsp() const = 0;
};

/// Reads WAV and VFEA files named by a manifest, relative to base_dir.
class FileClipSource final : public ClipSource {
 public:
  FileClipSource(std::filesystem::path base_dir, const corpus::CorpusManifest& manifest,
                 dsp::DspParams dsp = {});

  SpectrogramPtr spectrogram(const corpus::ClipRecord& record) const override;
  VisualPtr visual(const corpus::ClipRecord& record) const override;
  const dsp::DspParams& dsp() const override { return dsp_; }

 private:
  std::filesystem::path base_;
  bool per_video_;
  dsp::DspParams dsp_;
  mutable std::mutex mu_;
  mutable std::map<std::string, SpectrogramPtr> spectrograms_;
  mutable std::map<std::string, VisualPtr> visuals_;
};

/// Renders synthetic clips on demand and keeps only their spectrograms and
/// features, so large corpora never hold raw audio in memory.
class SynthClipSource final : public ClipSource {
 public:
  SynthClipSource(const synth::SynthParams& params, dsp::DspParams dsp = {});

  SpectrogramPtr spectrogram(const corpus::ClipRecord& record) const override;
  VisualPtr visual(const corpus::ClipRecord& record) const override;
  const dsp::DspParams& dsp() const override { return dsp_; }

  const corpus::CorpusManifest& manifest() const noexcept { return manifest_; }

 private:
  struct Entry {
    SpectrogramPtr spectrogram;
    VisualPtr visual;
  };
  const Entry& entry(const corpus::ClipRecord& record) const;

  synth::SynthWorld world_;
  corpus::CorpusManifest manifest_;
  dsp::DspParams dsp_;
  std::map<std::string, std::size_t, std::less<>> index_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, Entry> cache_;
};

/// Row i of audio and visual embeds records[i].
struct Embeddings {
  Tensor audio;
  Tensor visual;
  std::vector<std::string> video_ids;
  std::vector<std::string> clip_ids;
};

Embeddings embed_records(const graph::ParamSet& params, const enc::EncoderConfig& config,
                         enc::VisualMode mode, std::span<const corpus::ClipRecord> records,
                         const ClipSource& source);

}  // namespace avc::train
