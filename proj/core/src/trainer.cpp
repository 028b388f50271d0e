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

#include "avcascade/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "avcascade/error.hpp"
#include "avcascade/loss.hpp"
#include "avcascade/metrics.hpp"
#include "avcascade/optim.hpp"
#include "avcascade/rng.hpp"

namespace avc::train {

std::string_view stage_name(Stage stage) noexcept {
  return stage == Stage::kPretrain ? "pretrain" : "finetune";
}

Stage parse_stage(std::string_view name) {
  if (name == "pretrain") return Stage::kPretrain;
  if (name == "finetune") return Stage::kFinetune;
  fail(ErrorCode::kConfiguration, "unknown stage '" + std::string(name) + "'");
}

StageConfig StageConfig::pretrain_defaults() {
  StageConfig c;
  c.stage = Stage::kPretrain;
  c.epochs = 15;
  return c;
}

StageConfig StageConfig::finetune_defaults() {
  StageConfig c;
  c.stage = Stage::kFinetune;
  c.epochs = 30;
  return c;
}

void StageConfig::validate() const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kConfiguration, "stage config: " + what); };
  if (videos_per_batch == 0 || clips_per_video == 0) bad("pretrain batch geometry must be positive");
  if (!(clip_len_s > 0.0)) bad("clip_len_s must be positive");
  if (flat_batch_clips == 0) bad("flat_batch_clips must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) bad("lr must be positive");
  if (epochs == 0) bad("epochs must be at least 1");
  if (!(margin >= 0.0) || !std::isfinite(margin)) bad("margin must be non-negative");
}

nlohmann::json StageConfig::to_json() const {
  return {{"stage", stage_name(stage)},
          {"videos_per_batch", videos_per_batch},
          {"clips_per_video", clips_per_video},
          {"clip_len_s", clip_len_s},
          {"flat_batch_clips", flat_batch_clips},
          {"lr", lr},
          {"epochs", epochs},
          {"freeze_visual", freeze_visual},
          {"mode", enc::visual_mode_name(mode)},
          {"seed", seed},
          {"margin", margin},
          {"select_best_val", select_best_val},
          {"standardize_inputs", standardize_inputs}};
}

StageConfig StageConfig::from_json(const nlohmann::json& j) {
  StageConfig c;
  try {
    c.stage = parse_stage(j.at("stage").get<std::string>());
    c.videos_per_batch = j.at("videos_per_batch").get<std::size_t>();
    c.clips_per_video = j.at("clips_per_video").get<std::size_t>();
    c.clip_len_s = j.at("clip_len_s").get<double>();
    c.flat_batch_clips = j.at("flat_batch_clips").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.freeze_visual = j.at("freeze_visual").get<bool>();
    c.mode = enc::parse_visual_mode(j.at("mode").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.margin = j.at("margin").get<double>();
    c.select_best_val = j.at("select_best_val").get<bool>();
    c.standardize_inputs = j.at("standardize_inputs").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("stage config: ") + e.what());
  }
  c.validate();
  return c;
}

const std::set<std::string, std::less<>>& StageConfig::known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "stage", "videos_per_batch", "clips_per_video", "clip_len_s", "flat_batch_clips",
      "lr",    "epochs",           "freeze_visual",   "mode",       "seed",
      "margin", "select_best_val", "standardize_inputs"};
  return keys;
}

StageConfig StageConfig::from_key_values(const config::KeyValues& kv, StageConfig c) {
  if (kv.has("stage")) c.stage = parse_stage(kv.get_string("stage", ""));
  c.videos_per_batch = kv.get_size("videos_per_batch", c.videos_per_batch);
  c.clips_per_video = kv.get_size("clips_per_video", c.clips_per_video);
  c.clip_len_s = kv.get_double("clip_len_s", c.clip_len_s);
  c.flat_batch_clips = kv.get_size("flat_batch_clips", c.flat_batch_clips);
  c.lr = kv.get_double("lr", c.lr);
  c.epochs = kv.get_size("epochs", c.epochs);
  c.freeze_visual = kv.get_bool("freeze_visual", c.freeze_visual);
  if (kv.has("mode")) c.mode = enc::parse_visual_mode(kv.get_string("mode", ""));
  c.seed = kv.get_u64("seed", c.seed);
  c.margin = kv.get_double("margin", c.margin);
  c.select_best_val = kv.get_bool("select_best_val", c.select_best_val);
  c.standardize_inputs = kv.get_bool("standardize_inputs", c.standardize_inputs);
  c.validate();
  return c;
}

// ---- Batches -------------------------------------------------------------------

std::vector<BatchPlan> plan_epoch(const corpus::CorpusManifest& split, const StageConfig& cfg,
                                  std::uint64_t epoch) {
  cfg.validate();
  require(!split.records.empty(), ErrorCode::kEmptySplit, "cannot build batches from an empty split");
  std::vector<BatchPlan> plans;

  if (cfg.stage == Stage::kFinetune) {
    const std::size_t n = split.records.size();
    require(n >= cfg.flat_batch_clips, ErrorCode::kEmptySplit,
            "split has " + std::to_string(n) + " clips, fewer than one batch of " +
                std::to_string(cfg.flat_batch_clips));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    CounterRng rng(derive_seed(cfg.seed, "finetune.order"), epoch);
    rng.shuffle(std::span(order));
    for (std::size_t b = 0; b + cfg.flat_batch_clips <= n; b += cfg.flat_batch_clips) {
      BatchPlan plan;
      for (std::size_t i = b; i < b + cfg.flat_batch_clips; ++i) plan.slots.push_back({order[i], 0.0});
      plans.push_back(std::move(plan));
    }
    return plans;
  }

  std::map<std::string, std::vector<std::size_t>> by_video;
  for (std::size_t i = 0; i < split.records.size(); ++i) by_video[split.records[i].video_id].push_back(i);
  std::vector<std::string> videos;
  for (const auto& [v, _] : by_video) videos.push_back(v);
  require(videos.size() >= cfg.videos_per_batch, ErrorCode::kEmptySplit,
          "split has " + std::to_string(videos.size()) + " videos, fewer than one batch of " +
              std::to_string(cfg.videos_per_batch));

  CounterRng order_rng(derive_seed(cfg.seed, "pretrain.order"), epoch);
  order_rng.shuffle(std::span(videos));
  CounterRng clip_rng(derive_seed(cfg.seed, "pretrain.clips"), epoch);
  const std::size_t M = cfg.clips_per_video;
  for (std::size_t b = 0; b + cfg.videos_per_batch <= videos.size(); b += cfg.videos_per_batch) {
    BatchPlan plan;
    plan.slots.reserve(cfg.videos_per_batch * M);
    for (std::size_t v = b; v < b + cfg.videos_per_batch; ++v) {
      std::vector<std::size_t> clips = by_video[videos[v]];
      if (clips.size() >= M) {
        clip_rng.shuffle(std::span(clips));
        clips.resize(M);
        std::sort(clips.begin(), clips.end());
      } else {
        std::vector<std::size_t> drawn(M);
        for (auto& c : drawn) c = clips[clip_rng.below(clips.size())];
        clips = std::move(drawn);
      }
      for (std::size_t c : clips) plan.slots.push_back({c, clip_rng.uniform()});
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

Batch materialize(const BatchPlan& plan, const corpus::CorpusManifest& split, const StageConfig& cfg,
                  const ClipSource& source) {
  const dsp::DspParams& dsp = source.dsp();
  const std::size_t window =
      dsp::frame_count(static_cast<std::size_t>(std::llround(cfg.clip_len_s * dsp.sample_rate_hz)), dsp);
  Batch batch;
  batch.spectrograms.reserve(plan.slots.size());
  batch.visual.reserve(plan.slots.size());
  for (const BatchSlot& slot : plan.slots) {
    require(slot.record < split.records.size(), ErrorCode::kContractViolation, "batch slot out of range");
    const corpus::ClipRecord& rec = split.records[slot.record];
    const SpectrogramPtr spec = source.spectrogram(rec);
    if (cfg.stage == Stage::kPretrain) {
      std::size_t start = 0;
      if (spec->valid_frames > window) {
        const std::size_t slack = spec->valid_frames - window;
        start = std::min(slack, static_cast<std::size_t>(slot.window_position * static_cast<double>(slack + 1)));
      }
      batch.spectrograms.push_back(dsp::slice_frames(*spec, start, window, dsp));
    } else {
      batch.spectrograms.push_back(dsp::fit_length(*spec, dsp));
    }
    batch.visual.push_back(source.visual(rec));
    batch.video_ids.push_back(rec.video_id);
    batch.clip_ids.push_back(rec.clip_id);
  }
  return batch;
}

BatchStream::BatchStream(const corpus::CorpusManifest& split, const StageConfig& cfg, std::uint64_t epoch,
                         const ClipSource& source)
    : split_(split), cfg_(cfg), source_(source), plans_(plan_epoch(split, cfg, epoch)) {}

bool BatchStream::next(Batch& out) {
  if (pos_ >= plans_.size()) return false;
  out = materialize(plans_[pos_++], split_, cfg_, source_);
  return true;
}

// ---- Training ------------------------------------------------------------------

void apply_stage_flags(graph::ParamSet& params, const StageConfig& cfg) {
  params.set_frozen_prefix("", false);
  if (cfg.freeze_visual) params.set_frozen_prefix(enc::kVisualPrefix, true);
  if (cfg.mode == enc::VisualMode::kImage) params.set_frozen_prefix(std::string(enc::kVisualPrefix) + "proj3d.", true);
}

namespace {

/// Mean and inverse standard deviation of the valid log-mel cells of the
/// first few training clips.
void fit_standardization(enc::EncoderConfig& encoder, const corpus::CorpusManifest& split,
                         const ClipSource& source) {
  constexpr std::size_t kProbeClips = 64;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < std::min(kProbeClips, split.records.size()); ++i) {
    const SpectrogramPtr spec = source.spectrogram(split.records[i]);
    const std::size_t cells = spec->valid_frames * spec->bins;
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = spec->values[c];
      sum += v;
      sum_sq += v * v;
    }
    count += cells;
  }
  if (count < 2) return;
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  if (!(var > 0.0)) return;
  encoder.input_offset = static_cast<float>(mean);
  encoder.input_scale = static_cast<float>(1.0 / std::sqrt(var));
}

void check_data_dims(const enc::EncoderConfig& encoder, const StageData& data) {
  require(data.source->dsp().mel_bins == encoder.mel_bins, ErrorCode::kShapeMismatch,
          "checkpoint expects " + std::to_string(encoder.mel_bins) + " mel bins but the corpus front end produces " +
              std::to_string(data.source->dsp().mel_bins));
  const VisualPtr v = data.source->visual(data.train->records.front());
  require(v->dim_2d == encoder.dim_2d, ErrorCode::kShapeMismatch,
          "checkpoint expects 2D features of dim " + std::to_string(encoder.dim_2d) + ", corpus has " +
              std::to_string(v->dim_2d));
  require(v->dim_3d == encoder.dim_3d || v->segments_3d == 0, ErrorCode::kShapeMismatch,
          "checkpoint expects 3D features of dim " + std::to_string(encoder.dim_3d) + ", corpus has " +
              std::to_string(v->dim_3d));
}

double validation_r10(const graph::ParamSet& params, const enc::EncoderConfig& encoder,
                      const StageConfig& cfg, const StageData& data) {
  const Embeddings e = embed_records(params, encoder, cfg.mode, data.validation->records, *data.source);
  return eval::make_reports(enc::similarity_matrix(e.audio, e.visual).scores).mean_r10();
}

double train_batch(graph::ParamSet& params, graph::AdamState& adam, const Batch& batch,
                   const enc::EncoderConfig& encoder, const StageConfig& cfg) {
  graph::Graph g;
  std::vector<graph::Var> audio, visual;
  audio.reserve(batch.size());
  visual.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    audio.push_back(enc::audio_forward(g, params, batch.spectrograms[i], encoder));
    visual.push_back(enc::visual_forward(g, params, *batch.visual[i], encoder, cfg.mode));
  }
  const graph::Var scores = g.matmul_nt(g.stack_rows(audio), g.stack_rows(visual));
  const graph::Var loss = loss::mms_loss(g, scores, {cfg.margin});
  const double value = g.value(loss).item();
  graph::Gradients grads = g.backward(loss);
  // Parameters a batch never touched still need an entry for the optimizer.
  for (const auto& [name, e] : params.entries())
    if (!e.frozen && !grads.contains(name)) grads.emplace(name, Tensor(e.value.shape()));
  graph::adam_step(params, grads, adam, cfg.lr);
  for (const auto& [name, e] : params.entries()) {
    if (e.frozen) continue;
    for (double& v : params.mutable_value(name).values()) v = static_cast<float>(v);
  }
  return value;
}

}  // namespace

TrainResult train_stage(const StageConfig& cfg, const StageData& data, const std::optional<Checkpoint>& init,
                        const enc::EncoderConfig& encoder_config,
                        const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  require(data.train != nullptr && data.source != nullptr, ErrorCode::kInvalidArgument,
          "train_stage needs a training split and a clip source");
  require(!data.train->records.empty(), ErrorCode::kEmptySplit, "training split is empty");

  TrainResult result;
  Checkpoint& ckpt = result.checkpoint;
  if (init) {
    ckpt = *init;
    enc::check_params(ckpt.params, ckpt.encoder);
  } else {
    ckpt.encoder = encoder_config;
    ckpt.encoder.validate();
    if (cfg.standardize_inputs) fit_standardization(ckpt.encoder, *data.train, *data.source);
    ckpt.params = enc::init_params(ckpt.encoder, derive_seed(cfg.seed, "init"));
    ckpt.provenance.push_back({"init", "", "", cfg.seed, 0, 0});
  }
  check_data_dims(ckpt.encoder, data);
  apply_stage_flags(ckpt.params, cfg);

  const bool select = cfg.select_best_val && data.validation != nullptr && !data.validation->records.empty();
  graph::ParamSet best = ckpt.params;
  double best_r10 = -1.0;
  std::size_t best_epoch = cfg.epochs;

  graph::AdamState adam;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    BatchStream stream(*data.train, cfg, epoch, *data.source);
    EpochLog log;
    log.epoch = epoch;
    double total = 0.0;
    Batch batch;
    while (stream.next(batch)) {
      double value = 0.0;
      try {
        value = train_batch(ckpt.params, adam, batch, ckpt.encoder, cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumerical) throw;
        fail(ErrorCode::kNumerical, std::string(stage_name(cfg.stage)) + " diverged at epoch " +
                                        std::to_string(epoch) + ", batch " + std::to_string(log.batches + 1) +
                                        " (lr " + std::to_string(cfg.lr) + "): " + e.what());
      }
      total += value;
      ++log.batches;
    }
    log.mean_loss = total / static_cast<double>(log.batches);
    if (select) {
      log.val_r10 = validation_r10(ckpt.params, ckpt.encoder, cfg, data);
      if (*log.val_r10 > best_r10) {
        best_r10 = *log.val_r10;
        best = ckpt.params;
        best_epoch = epoch;
      }
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  if (select) ckpt.params = std::move(best);

  ckpt.config = cfg.to_json();
  ckpt.provenance.push_back(
      {std::string(stage_name(cfg.stage)), data.corpus_id, data.language, cfg.seed, cfg.epochs, best_epoch});
  ckpt.rng = {cfg.seed, cfg.epochs};
  return result;
}

}  // namespace avc::train
