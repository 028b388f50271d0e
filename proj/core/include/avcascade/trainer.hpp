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
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "avcascade/checkpoint.hpp"
#include "avcascade/config.hpp"
#include "avcascade/corpus.hpp"
#include "avcascade/dataset.hpp"
#include "avcascade/encoders.hpp"

namespace avc::train {

enum class Stage { kPretrain, kFinetune };
std::string_view stage_name(Stage stage) noexcept;
Stage parse_stage(std::string_view name);

/// Fine-tuning rate for image mode with the visual branch frozen; the
/// trainable setting keeps the default 1e-4.
inline constexpr double kFrozenImageLr = 1e-3;

struct StageConfig {
  Stage stage = Stage::kPretrain;
  /// Pretraining geometry: videos_per_batch videos, clips_per_video clips
  /// each, every clip cut to a clip_len_s audio window.
  std::size_t videos_per_batch = 128;
  std::size_t clips_per_video = 32;
  double clip_len_s = 10.0;
  /// Fine-tuning geometry: flat shuffled batches of whole clips.
  std::size_t flat_batch_clips = 256;
  double lr = 1e-4;
  std::size_t epochs = 15;
  bool freeze_visual = false;
  enc::VisualMode mode = enc::VisualMode::kVideo;
  std::uint64_t seed = 0;
  double margin = 0.001;
  /// Keep the epoch with the best mean validation R@10 instead of the last.
  bool select_best_val = true;
  /// On fresh initialization, fix the input standardization from training
  /// spectrogram statistics.
  bool standardize_inputs = true;

  static StageConfig pretrain_defaults();
  static StageConfig finetune_defaults();

  std::size_t batch_clips() const noexcept {
    return stage == Stage::kPretrain ? videos_per_batch * clips_per_video : flat_batch_clips;
  }
  void validate() const;
  nlohmann::json to_json() const;
  static StageConfig from_json(const nlohmann::json& j);
  /// Overrides fields of base from keys named like the struct fields.
  static StageConfig from_key_values(const config::KeyValues& kv, StageConfig base);
  static const std::set<std::string, std::less<>>& known_keys();

  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

/// One batch position: a record of the split manifest and, for pretraining,
/// where its audio window starts as a fraction of the available slack.
struct BatchSlot {
  std::size_t record = 0;
  double window_position = 0.0;
};

struct BatchPlan {
  std::vector<BatchSlot> slots;
};

/// Batches of one epoch, a pure function of (split, cfg, epoch).
///
/// Pretraining shuffles the videos, takes them videos_per_batch at a time and
/// draws clips_per_video clips from each (with replacement when a video has
/// fewer). Fine-tuning shuffles all clips into flat batches. Both drop the
/// last partial batch.
std::vector<BatchPlan> plan_epoch(const corpus::CorpusManifest& split, const StageConfig& cfg,
                                  std::uint64_t epoch);

/// Aligned model inputs: position i of every field belongs to one clip.
struct Batch {
  std::vector<dsp::MelSpectrogram> spectrograms;
  std::vector<VisualPtr> visual;
  std::vector<std::string> video_ids;
  std::vector<std::string> clip_ids;

  std::size_t size() const noexcept { return clip_ids.size(); }
};

/// Pretraining cuts a clip_len_s window out of each clip's spectrogram;
/// fine-tuning fits each whole clip to the maximum duration.
Batch materialize(const BatchPlan& plan, const corpus::CorpusManifest& split, const StageConfig& cfg,
                  const ClipSource& source);

/// make_batches: the batches of one epoch, materialized one at a time.
class BatchStream {
 public:
  BatchStream(const corpus::CorpusManifest& split, const StageConfig& cfg, std::uint64_t epoch,
              const ClipSource& source);
  std::size_t size() const noexcept { return plans_.size(); }
  bool next(Batch& out);

 private:
  const corpus::CorpusManifest& split_;
  StageConfig cfg_;
  const ClipSource& source_;
  std::vector<BatchPlan> plans_;
  std::size_t pos_ = 0;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  std::size_t batches = 0;
  double mean_loss = 0.0;
  std::optional<double> val_r10;
};

struct StageData {
  const corpus::CorpusManifest* train = nullptr;       // the training split
  const corpus::CorpusManifest* validation = nullptr;  // optional
  const ClipSource* source = nullptr;
  std::string corpus_id;
  std::string language;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
};

/// Runs cfg.epochs epochs of batches -> embeddings -> similarity -> loss ->
/// backward -> Adam. Starts from init when given, else from a fresh seeded
/// initialization of encoder. Parameters stay representable as f32 after
/// every step, so the returned checkpoint survives a save/load unchanged.
TrainResult train_stage(const StageConfig& cfg, const StageData& data, const std::optional<Checkpoint>& init,
                        const enc::EncoderConfig& encoder = {},
                        const std::function<void(const EpochLog&)>& on_epoch = {});

/// Frozen flags a stage applies: visual.* under freeze_visual, and the 3D
/// projection in image mode, which never sees data there.
void apply_stage_flags(graph::ParamSet& params, const StageConfig& cfg);

}  // namespace avc::train
