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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avcascade/eval.hpp"
#include "avcascade/trainer.hpp"

namespace avc::train {

struct CascadeConfig {
  StageConfig pretrain = StageConfig::pretrain_defaults();
  StageConfig finetune = StageConfig::finetune_defaults();
  /// Target-only baseline; trained from fresh parameters on the target.
  StageConfig scratch = StageConfig::finetune_defaults();
  enc::EncoderConfig encoder;
  bool run_scratch = true;
};

/// A corpus whose records already carry their splits.
struct CorpusInput {
  const corpus::CorpusManifest* manifest = nullptr;
  const ClipSource* source = nullptr;
  std::string corpus_id;
};

struct CascadeResult {
  std::optional<Checkpoint> scratch;
  Checkpoint pretrained;
  Checkpoint zero_shot;  // the pretrained parameters, untouched by target data
  Checkpoint finetuned;
  std::optional<eval::ReportPair> scratch_report;
  eval::ReportPair zero_shot_report;
  eval::ReportPair finetuned_report;
  std::vector<EpochLog> scratch_log;
  std::vector<EpochLog> pretrain_log;
  std::vector<EpochLog> finetune_log;
};

using StageProgress = std::function<void(std::string_view stage, const EpochLog&)>;

/// Pretrains on the source train split, scores the result on the target test
/// split without target training (zero-shot), fine-tunes it on the target
/// train split, and trains the target-only baseline. All reports use the
/// target test split. A given pretrained checkpoint skips pretraining.
CascadeResult run_cascade(const CorpusInput& source, const CorpusInput& target, const CascadeConfig& cfg,
                          const std::optional<Checkpoint>& pretrained = std::nullopt,
                          const StageProgress& progress = {});

/// Wraps one split of a corpus for train_stage.
StageData stage_data(const corpus::CorpusManifest& train, const corpus::CorpusManifest* validation,
                     const CorpusInput& corpus);

}  // namespace avc::train

namespace avc::eval {

struct TransferPoint {
  double percent = 100.0;
  ReportPair zero_shot;
  ReportPair finetuned;
};

/// For every percent (ascending, in (0, 100]) keeps that share of the
/// source videos, nested across percents via subsample_seed, and runs the
/// cascade without the scratch baseline.
std::vector<TransferPoint> transfer_curve(const std::vector<double>& percents, const train::CorpusInput& source,
                                          const train::CorpusInput& target, const train::CascadeConfig& cfg,
                                          std::uint64_t subsample_seed,
                                          const train::StageProgress& progress = {});

/// Columns percent,direction,model,r1,r5,r10,med_rank.
std::string transfer_curve_csv(const std::vector<TransferPoint>& points);

}  // namespace avc::eval
