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

#include "avcascade/cascade.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "avcascade/error.hpp"

namespace avc::train {

namespace {

void check_corpus(const CorpusInput& c, const char* role) {
  require(c.manifest != nullptr && c.source != nullptr, ErrorCode::kInvalidArgument,
          std::string(role) + " corpus is missing");
  require(!c.manifest->language.empty(), ErrorCode::kContractViolation,
          std::string(role) + " corpus has no language tag");
}

}  // namespace

StageData stage_data(const corpus::CorpusManifest& train, const corpus::CorpusManifest* validation,
                     const CorpusInput& corpus) {
  return StageData{&train, validation, corpus.source, corpus.corpus_id, corpus.manifest->language};
}

CascadeResult run_cascade(const CorpusInput& source, const CorpusInput& target, const CascadeConfig& cfg,
                          const std::optional<Checkpoint>& pretrained, const StageProgress& progress) {
  check_corpus(source, "source");
  check_corpus(target, "target");
  {
    const auto a = source.manifest->video_ids();
    const auto b = target.manifest->video_ids();
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    require(common.empty(), ErrorCode::kContractViolation,
            "source and target corpora share video '" + (common.empty() ? "" : common.front()) + "'");
  }

  const auto src_train = source.manifest->select(corpus::Split::kTrain);
  const auto src_val = source.manifest->select(corpus::Split::kVal);
  const auto tgt_train = target.manifest->select(corpus::Split::kTrain);
  const auto tgt_val = target.manifest->select(corpus::Split::kVal);
  const auto tgt_test = target.manifest->select(corpus::Split::kTest);
  require(!tgt_test.records.empty(), ErrorCode::kEmptySplit, "target corpus has no test split");

  const auto report = [&](const Checkpoint& ckpt, const std::string& model, enc::VisualMode mode) {
    eval::EvalOptions opt;
    opt.model = model;
    opt.corpus_id = target.corpus_id;
    opt.split = "test";
    return eval::evaluate(ckpt, tgt_test, *target.source, mode, opt);
  };
  const auto hook = [&](std::string_view stage) {
    return [&progress, stage](const EpochLog& log) {
      if (progress) progress(stage, log);
    };
  };

  CascadeResult out;
  if (pretrained) {
    out.pretrained = *pretrained;
  } else {
    TrainResult r = train_stage(cfg.pretrain, stage_data(src_train, &src_val, source), std::nullopt, cfg.encoder,
                                hook("pretrain"));
    out.pretrained = std::move(r.checkpoint);
    out.pretrain_log = std::move(r.log);
  }

  out.zero_shot = out.pretrained;
  out.zero_shot_report = report(out.zero_shot, "zero_shot", cfg.finetune.mode);

  TrainResult ft = train_stage(cfg.finetune, stage_data(tgt_train, &tgt_val, target), out.pretrained, cfg.encoder,
                               hook("finetune"));
  out.finetuned = std::move(ft.checkpoint);
  out.finetune_log = std::move(ft.log);
  out.finetuned_report = report(out.finetuned, "finetuned", cfg.finetune.mode);

  if (cfg.run_scratch) {
    TrainResult sc = train_stage(cfg.scratch, stage_data(tgt_train, &tgt_val, target), std::nullopt, cfg.encoder,
                                 hook("scratch"));
    out.scratch = std::move(sc.checkpoint);
    out.scratch_log = std::move(sc.log);
    out.scratch_report = report(*out.scratch, "scratch", cfg.scratch.mode);
  }
  return out;
}

}  // namespace avc::train

namespace avc::eval {

std::vector<TransferPoint> transfer_curve(const std::vector<double>& percents, const train::CorpusInput& source,
                                          const train::CorpusInput& target, const train::CascadeConfig& cfg,
                                          std::uint64_t subsample_seed, const train::StageProgress& progress) {
  require(!percents.empty(), ErrorCode::kInvalidArgument, "transfer curve needs at least one percent");
  for (std::size_t i = 0; i < percents.size(); ++i) {
    require(percents[i] > 0.0 && percents[i] <= 100.0, ErrorCode::kInvalidArgument,
            "transfer curve percents must lie in (0, 100]");
    require(i == 0 || percents[i] > percents[i - 1], ErrorCode::kInvalidArgument,
            "transfer curve percents must be strictly ascending");
  }
  train::CascadeConfig c = cfg;
  c.run_scratch = false;
  std::vector<TransferPoint> points;
  for (double p : percents) {
    const corpus::CorpusManifest sub =
        p == 100.0 ? *source.manifest : corpus::subsample(*source.manifest, p, subsample_seed);
    train::CorpusInput src = source;
    src.manifest = &sub;
    const train::CascadeResult r = train::run_cascade(src, target, c, std::nullopt, progress);
    points.push_back({p, r.zero_shot_report, r.finetuned_report});
  }
  return points;
}

namespace {

/// Shortest text that parses back to the same double.
std::string exact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string transfer_curve_csv(const std::vector<TransferPoint>& points) {
  std::string out = "percent,direction,model,r1,r5,r10,med_rank\n";
  for (const auto& p : points) {
    for (const auto& [model, pair] : {std::pair{"zero_shot", &p.zero_shot}, std::pair{"finetuned", &p.finetuned}}) {
      for (const RetrievalReport* r : {&pair->audio_to_visual, &pair->visual_to_audio}) {
        out += exact(p.percent) + "," + std::string(direction_name(r->direction)) + "," + model + "," +
               exact(r->recall(1)) + "," + exact(r->recall(5)) + "," + exact(r->recall(10)) + "," +
               exact(r->median_rank) + "\n";
      }
    }
  }
  return out;
}

}  // namespace avc::eval
