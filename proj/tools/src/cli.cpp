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


#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "avcascade/benchmark.hpp"
#include "avcascade/binary_io.hpp"
#include "avcascade/cascade.hpp"
#include "avcascade/checkpoint.hpp"
#include "avcascade/config.hpp"
#include "avcascade/corpus.hpp"
#include "avcascade/dataset.hpp"
#include "avcascade/error.hpp"
#include "avcascade/eval.hpp"
#include "avcascade/synth.hpp"
#include "avcascade/trainer.hpp"
#include "avcascade/wav.hpp"
#include "curve_plot.hpp"
#include "run_manifest.hpp"

namespace avc::cli {

namespace {

namespace fs = std::filesystem;
using config::KeyValues;
using train::StageConfig;

/// Bad flag combinations found after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  std::string command;
  std::vector<std::string> args;
  KeyValues kv;
  std::uint64_t seed = 0;
  fs::path out_dir;
  bool verbose = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  RunManifest manifest{"", {}};
};

// ---- Configuration ---------------------------------------------------------

constexpr const char* kSections[] = {"pretrain", "finetune", "scratch"};

std::set<std::string, std::less<>> known_config_keys() {
  std::set<std::string, std::less<>> keys = {"seed", "encoder.conv_channels", "encoder.kernel", "encoder.stride",
                                             "encoder.embed_dim"};
  for (const auto& k : StageConfig::known_keys()) {
    if (k == "stage") continue;
    keys.insert(k);
    for (const char* s : kSections) keys.insert(std::string(s) + "." + k);
  }
  return keys;
}

/// Unsectioned keys apply to every stage; "<section>.<key>" overrides them.
StageConfig stage_config(const KeyValues& kv, std::string_view section, StageConfig base) {
  KeyValues sub;
  for (const auto& [k, v] : kv.entries())
    if (k.find('.') == std::string::npos && k != "seed") sub.set(k, v);
  const std::string prefix = std::string(section) + ".";
  for (const auto& [k, v] : kv.entries())
    if (k.starts_with(prefix)) sub.set(k.substr(prefix.size()), v);
  return StageConfig::from_key_values(sub, base);
}

std::size_t parse_size(const std::string& s, const std::string& key) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::kConfiguration,
          "config key " + key + ": '" + s + "' is not a non-negative integer");
  return v;
}

enc::EncoderConfig encoder_config(const KeyValues& kv) {
  enc::EncoderConfig e;
  if (kv.has("encoder.conv_channels")) {
    e.conv_channels.clear();
    for (const auto& s : kv.get_list("encoder.conv_channels", {}))
      e.conv_channels.push_back(parse_size(s, "encoder.conv_channels"));
  }
  e.kernel = kv.get_size("encoder.kernel", e.kernel);
  e.stride = kv.get_size("encoder.stride", e.stride);
  e.embed_dim = kv.get_size("encoder.embed_dim", e.embed_dim);
  e.validate();
  return e;
}

/// Desk-scale benchmark stages, adjusted by the config file.
train::CascadeConfig cascade_config(const Context& ctx) {
  train::CascadeConfig c = train::BenchmarkSpec::defaults(ctx.seed).cascade;
  c.pretrain = stage_config(ctx.kv, "pretrain", c.pretrain);
  c.finetune = stage_config(ctx.kv, "finetune", c.finetune);
  c.scratch = stage_config(ctx.kv, "scratch", c.scratch);
  c.encoder = encoder_config(ctx.kv);
  return c;
}

nlohmann::json cascade_json(const train::CascadeConfig& c) {
  return {{"pretrain", c.pretrain.to_json()},
          {"finetune", c.finetune.to_json()},
          {"scratch", c.scratch.to_json()},
          {"encoder", c.encoder.to_json()}};
}

// ---- Inputs and outputs ----------------------------------------------------

struct Corpus {
  fs::path manifest_path;
  corpus::CorpusManifest manifest;
  std::unique_ptr<train::FileClipSource> source;
  std::string id;

  train::CorpusInput input() const { return {&manifest, source.get(), id}; }
};

/// arg is a corpus directory holding manifest.jsonl, or a manifest file.
std::unique_ptr<Corpus> load_corpus(Context& ctx, const std::string& arg) {
  auto c = std::make_unique<Corpus>();
  const fs::path p(arg);
  c->manifest_path = fs::is_directory(p) ? p / "manifest.jsonl" : p;
  c->manifest = corpus::read_manifest(c->manifest_path);
  c->source = std::make_unique<train::FileClipSource>(c->manifest_path.parent_path(), c->manifest);
  c->id = corpus::manifest_id(c->manifest);
  ctx.manifest.add_input(c->manifest_path, "manifest");
  return c;
}

train::Checkpoint load_ckpt(Context& ctx, const std::string& path) {
  train::Checkpoint ckpt = train::load_checkpoint(path);
  ctx.manifest.add_input(path, "checkpoint");
  return ckpt;
}

void write_output(Context& ctx, const std::string& rel, std::string_view bytes) {
  io::write_file(ctx.out_dir / rel, bytes);
  ctx.manifest.add_output(ctx.out_dir, rel);
}

void save_ckpt(Context& ctx, const std::string& name, const train::Checkpoint& ckpt) {
  write_output(ctx, name + ".avck", train::encode_checkpoint(ckpt));
  *ctx.out << name << ".avck  id " << train::checkpoint_id(ckpt) << "\n";
}

void write_log(Context& ctx, const std::string& name, const std::vector<train::EpochLog>& log) {
  std::string text;
  for (const auto& l : log) {
    nlohmann::json j = {{"epoch", l.epoch}, {"batches", l.batches}, {"mean_loss", l.mean_loss}};
    if (l.val_r10) j["val_r10"] = *l.val_r10;
    text += j.dump() + "\n";
  }
  write_output(ctx, name + ".log.jsonl", text);
}

void write_reports(Context& ctx, const std::string& model, const eval::ReportPair& pair) {
  for (const auto* r : {&pair.audio_to_visual, &pair.visual_to_audio})
    write_output(ctx, model + "." + std::string(eval::direction_name(r->direction)) + ".json",
                 r->to_json().dump(2) + "\n");
  char line[160];
  std::snprintf(line, sizeof line, "%-10s R@1 %.3f/%.3f  R@5 %.3f/%.3f  R@10 %.3f/%.3f  (a->v / v->a, n=%zu)\n",
                model.c_str(), pair.audio_to_visual.recall(1), pair.visual_to_audio.recall(1),
                pair.audio_to_visual.recall(5), pair.visual_to_audio.recall(5), pair.audio_to_visual.recall(10),
                pair.visual_to_audio.recall(10), pair.audio_to_visual.n);
  *ctx.out << line;
}

train::StageProgress progress(const Context& ctx) {
  if (!ctx.verbose) return {};
  return [err = ctx.err](std::string_view stage, const train::EpochLog& l) {
    *err << "[" << stage << "] epoch " << l.epoch << "  loss " << l.mean_loss;
    if (l.val_r10) *err << "  val R@10 " << *l.val_r10;
    *err << std::endl;
  };
}

std::function<void(const train::EpochLog&)> stage_progress(const Context& ctx, std::string stage) {
  auto p = progress(ctx);
  if (!p) return {};
  return [p, stage](const train::EpochLog& l) { p(stage, l); };
}

eval::ReportPair evaluate_on(const Context& ctx, const train::Checkpoint& ckpt, const Corpus& c,
                             const std::string& split, enc::VisualMode mode, const std::string& model) {
  const auto records = c.manifest.select(corpus::parse_split(split));
  eval::EvalOptions opt;
  opt.model = model;
  opt.corpus_id = c.id;
  opt.split = split;
  opt.subset_seed = ctx.seed;
  return eval::evaluate(ckpt, records, *c.source, mode, opt);
}

corpus::SplitFractions fractions(const std::vector<double>& f, const char* flag) {
  if (f.size() != 3) throw UsageError(std::string(flag) + " takes three comma-separated fractions");
  return {f[0], f[1], f[2]};
}

// ---- Commands --------------------------------------------------------------

struct SynthOptions {
  std::vector<std::string> languages = {"en", "ja"};
  std::vector<std::size_t> videos = {400, 40};
  std::vector<double> source_splits = {0.7, 0.15, 0.15};
  std::vector<double> target_splits = {0.55, 0.10, 0.35};
  std::optional<std::size_t> clips, concepts, variants, tones;
  std::optional<double> shared, noise, duration;
};

void cmd_synth(Context& ctx, const SynthOptions& o) {
  if (o.languages.size() != o.videos.size())
    throw UsageError("--languages and --videos need the same number of entries");
  const train::BenchmarkSpec spec = train::BenchmarkSpec::defaults(ctx.seed);
  nlohmann::json resolved = nlohmann::json::object();
  for (std::size_t i = 0; i < o.languages.size(); ++i) {
    synth::SynthParams p = spec.source;
    p.languages = o.languages;
    p.language = o.languages[i];
    p.corpus_name = o.languages[i];
    p.num_videos = o.videos[i];
    p.seed = ctx.seed;
    p.clips_per_video = o.clips.value_or(p.clips_per_video);
    p.num_concepts = o.concepts.value_or(p.num_concepts);
    p.variants_per_concept = o.variants.value_or(p.variants_per_concept);
    p.tones_per_concept = o.tones.value_or(p.tones_per_concept);
    p.shared_concept_fraction = o.shared.value_or(p.shared_concept_fraction);
    p.noise_sigma = o.noise.value_or(p.noise_sigma);
    p.clip_duration_s = o.duration.value_or(p.clip_duration_s);

    const auto split = corpus::build_splits(synth::generate_manifest(p),
                                            fractions(i == 0 ? o.source_splits : o.target_splits,
                                                      i == 0 ? "--source-splits" : "--target-splits"),
                                            ctx.seed);
    const fs::path dir = ctx.out_dir / p.language;
    // Render one clip at a time; a full source corpus does not fit in memory.
    const synth::SynthWorld world = synth::build_world(p);
    for (std::size_t k = 0; k < split.records.size(); ++k) {
      const synth::SyntheticClip clip = synth::render_clip(world, k);
      require(clip.record.clip_id == split.records[k].clip_id, ErrorCode::kContractViolation,
              "synthetic manifest order changed while splitting");
      dsp::write_wav(dir / clip.record.audio_path, clip.audio);
      enc::write_visual_file(dir / clip.record.visual_feature_path, clip.visual);
    }
    corpus::write_manifest(dir / "manifest.jsonl", split);
    ctx.manifest.add_output(ctx.out_dir, p.language + "/manifest.jsonl");
    resolved[p.language] = {{"videos", p.num_videos},      {"clips_per_video", p.clips_per_video},
                            {"concepts", p.num_concepts},  {"variants", p.variants_per_concept},
                            {"tones", p.tones_per_concept}, {"shared", p.shared_concept_fraction},
                            {"noise", p.noise_sigma},      {"duration_s", p.clip_duration_s}};
    *ctx.out << p.language << ": " << split.records.size() << " clips, " << split.video_ids().size()
             << " videos -> " << (dir / "manifest.jsonl").string() << "\n";
  }
  ctx.manifest.set_config(resolved);
}

struct BuildOptions {
  std::string audio_dir, features_dir, language;
  double fps_2d = 1.0;
  double seconds_per_3d = 1.0;
  std::vector<double> splits = {0.7, 0.15, 0.15};
  corpus::VadParams vad;
};

enc::VisualFeatures slice_features(const enc::VisualFeatures& f, double start_s, double end_s, double fps_2d,
                                   double seconds_per_3d) {
  auto range = [&](std::size_t total, double rate) {
    const auto a = std::min(total, static_cast<std::size_t>(std::floor(start_s * rate)));
    auto b = std::min(total, static_cast<std::size_t>(std::ceil(end_s * rate)));
    return std::pair{a, std::max(b, std::min(total, a + 1))};
  };
  enc::VisualFeatures out;
  out.dim_2d = f.dim_2d;
  out.dim_3d = f.dim_3d;
  const auto [a2, b2] = range(f.frames_2d, fps_2d);
  out.frames_2d = b2 - a2;
  out.values_2d.assign(f.values_2d.begin() + static_cast<std::ptrdiff_t>(a2 * f.dim_2d),
                       f.values_2d.begin() + static_cast<std::ptrdiff_t>(b2 * f.dim_2d));
  const auto [a3, b3] = range(f.segments_3d, 1.0 / seconds_per_3d);
  out.segments_3d = b3 - a3;
  out.values_3d.assign(f.values_3d.begin() + static_cast<std::ptrdiff_t>(a3 * f.dim_3d),
                       f.values_3d.begin() + static_cast<std::ptrdiff_t>(b3 * f.dim_3d));
  return out;
}

void cmd_build_corpus(Context& ctx, const BuildOptions& o) {
  if (!(o.fps_2d > 0.0) || !(o.seconds_per_3d > 0.0))
    throw UsageError("--fps-2d and --seconds-per-3d must be positive");
  o.vad.validate();
  require(fs::is_directory(o.audio_dir), ErrorCode::kIo, "audio directory not found: " + o.audio_dir);
  std::vector<fs::path> wavs;
  for (const auto& e : fs::directory_iterator(o.audio_dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") wavs.push_back(e.path());
  std::sort(wavs.begin(), wavs.end());
  require(!wavs.empty(), ErrorCode::kEmptyCorpus, "no .wav files in " + o.audio_dir);

  corpus::CorpusManifest m;
  m.language = o.language;
  m.metadata[std::string(corpus::kAudioLayoutKey)] = "per_video";
  fs::create_directories(ctx.out_dir / "audio");
  fs::create_directories(ctx.out_dir / "features");
  for (const auto& wav_path : wavs) {
    const std::string video = wav_path.stem().string();
    const dsp::Waveform wave = dsp::normalize_audio(dsp::read_wav(wav_path), 16000);
    const fs::path feat_path = fs::path(o.features_dir) / (video + ".vfea");
    const enc::VisualFeatures features = enc::read_visual_file(feat_path);
    const auto clips = corpus::filter_clips(corpus::segment_speech(wave, o.vad), o.vad);
    ctx.manifest.add_input(wav_path, "audio");
    ctx.manifest.add_input(feat_path, "visual_features");
    if (clips.empty()) {
      *ctx.err << "note: " << video << " has no speech segment within the clip length bounds\n";
      continue;
    }
    fs::copy_file(wav_path, ctx.out_dir / "audio" / (video + ".wav"), fs::copy_options::overwrite_existing);
    for (std::size_t k = 0; k < clips.size(); ++k) {
      corpus::ClipRecord r;
      r.video_id = video;
      char idx[16];
      std::snprintf(idx, sizeof idx, "-c%02zu", k);
      r.clip_id = video + idx;
      r.start_s = clips[k].start_s;
      r.end_s = clips[k].end_s;
      r.language = o.language;
      r.audio_path = "audio/" + video + ".wav";
      r.visual_feature_path = "features/" + r.clip_id + ".vfea";
      enc::write_visual_file(ctx.out_dir / r.visual_feature_path,
                             slice_features(features, r.start_s, r.end_s, o.fps_2d, o.seconds_per_3d));
      m.records.push_back(std::move(r));
    }
  }
  require(!m.records.empty(), ErrorCode::kEmptyCorpus, "no clips survived segmentation and filtering");
  const auto split = corpus::build_splits(m, fractions(o.splits, "--splits"), ctx.seed);
  corpus::write_manifest(ctx.out_dir / "manifest.jsonl", split);
  ctx.manifest.add_output(ctx.out_dir, "manifest.jsonl");
  ctx.manifest.set_config({{"fps_2d", o.fps_2d},
                           {"seconds_per_3d", o.seconds_per_3d},
                           {"splits", o.splits},
                           {"vad",
                            {{"frame_ms", o.vad.frame_ms},
                             {"energy_threshold_db", o.vad.energy_threshold_db},
                             {"min_gap_s", o.vad.min_gap_s},
                             {"min_clip_s", o.vad.min_clip_s},
                             {"max_clip_s", o.vad.max_clip_s}}}});
  *ctx.out << split.records.size() << " clips from " << split.video_ids().size() << " videos ("
           << split.count(corpus::Split::kTrain) << " train, " << split.count(corpus::Split::kVal) << " val, "
           << split.count(corpus::Split::kTest) << " test clips)\n";
}

void cmd_pretrain(Context& ctx, const std::string& corpus_arg) {
  const auto c = load_corpus(ctx, corpus_arg);
  const train::CascadeConfig cc = cascade_config(ctx);
  const auto train_split = c->manifest.select(corpus::Split::kTrain);
  const auto val_split = c->manifest.select(corpus::Split::kVal);
  auto r = train::train_stage(cc.pretrain, train::stage_data(train_split, &val_split, c->input()), std::nullopt,
                              cc.encoder, stage_progress(ctx, "pretrain"));
  ctx.manifest.set_config({{"pretrain", cc.pretrain.to_json()}, {"encoder", cc.encoder.to_json()}});
  save_ckpt(ctx, "pretrained", r.checkpoint);
  write_log(ctx, "pretrained", r.log);
}

struct FinetuneOptions {
  std::string corpus, init, name;
  bool freeze_visual = false;
  bool image_mode = false;
};

void cmd_finetune(Context& ctx, const FinetuneOptions& o) {
  const auto c = load_corpus(ctx, o.corpus);
  const train::CascadeConfig cc = cascade_config(ctx);
  std::optional<train::Checkpoint> init;
  if (!o.init.empty()) init = load_ckpt(ctx, o.init);
  // Without --init this is the target-only baseline.
  StageConfig cfg = init ? cc.finetune : cc.scratch;
  if (o.freeze_visual) cfg.freeze_visual = true;
  if (o.image_mode) cfg.mode = enc::VisualMode::kImage;
  if (cfg.freeze_visual && o.image_mode && !ctx.kv.has("lr") && !ctx.kv.has(init ? "finetune.lr" : "scratch.lr"))
    cfg.lr = train::kFrozenImageLr;
  const std::string name = !o.name.empty() ? o.name : init ? "finetuned" : "scratch";

  const auto train_split = c->manifest.select(corpus::Split::kTrain);
  const auto val_split = c->manifest.select(corpus::Split::kVal);
  auto r = train::train_stage(cfg, train::stage_data(train_split, &val_split, c->input()), init, cc.encoder,
                              stage_progress(ctx, name));
  ctx.manifest.set_config({{"finetune", cfg.to_json()}, {"encoder", r.checkpoint.encoder.to_json()}});
  save_ckpt(ctx, name, r.checkpoint);
  write_log(ctx, name, r.log);
  if (c->manifest.count(corpus::Split::kTest) > 0)
    write_reports(ctx, name, evaluate_on(ctx, r.checkpoint, *c, "test", cfg.mode, name));
}

struct EvalCliOptions {
  std::string checkpoint, corpus, split = "test", model;
  bool image_mode = false;
};

void cmd_eval(Context& ctx, const EvalCliOptions& o, bool zero_shot) {
  const auto c = load_corpus(ctx, o.corpus);
  const train::Checkpoint ckpt = load_ckpt(ctx, o.checkpoint);
  if (zero_shot) {
    for (const auto& rec : ckpt.provenance)
      require(rec.stage == "init" || rec.language != c->manifest.language, ErrorCode::kContractViolation,
              "not a zero-shot evaluation: the checkpoint's " + rec.stage + " stage already saw " +
                  rec.language + " data");
  }
  const std::string model = zero_shot ? "zero_shot" : (o.model.empty() ? "eval" : o.model);
  const auto mode = o.image_mode ? enc::VisualMode::kImage : enc::VisualMode::kVideo;
  ctx.manifest.set_config({{"split", o.split}, {"mode", enc::visual_mode_name(mode)}, {"model", model}});
  write_reports(ctx, model, evaluate_on(ctx, ckpt, *c, o.split, mode, model));
}

struct CascadeOptions {
  std::string source, target, pretrained;
  bool image_mode = false;
  std::vector<double> percents = {10, 25, 50, 100};
  std::string metric = "r10";
};

void cmd_cascade(Context& ctx, const CascadeOptions& o) {
  const auto src = load_corpus(ctx, o.source);
  const auto tgt = load_corpus(ctx, o.target);
  train::CascadeConfig cc = cascade_config(ctx);
  if (o.image_mode) cc.finetune.mode = cc.scratch.mode = enc::VisualMode::kImage;
  std::optional<train::Checkpoint> pre;
  if (!o.pretrained.empty()) pre = load_ckpt(ctx, o.pretrained);
  ctx.manifest.set_config(cascade_json(cc));

  const auto r = train::run_cascade(src->input(), tgt->input(), cc, pre, progress(ctx));
  save_ckpt(ctx, "scratch", *r.scratch);
  save_ckpt(ctx, "zero_shot", r.zero_shot);
  save_ckpt(ctx, "finetuned", r.finetuned);
  if (!pre) write_log(ctx, "pretrain", r.pretrain_log);
  write_log(ctx, "scratch", r.scratch_log);
  write_log(ctx, "finetuned", r.finetune_log);
  write_reports(ctx, "scratch", *r.scratch_report);
  write_reports(ctx, "zero_shot", r.zero_shot_report);
  write_reports(ctx, "finetuned", r.finetuned_report);
  nlohmann::json summary = {{"scratch", r.scratch_report->mean_r10()},
                            {"zero_shot", r.zero_shot_report.mean_r10()},
                            {"finetuned", r.finetuned_report.mean_r10()}};
  write_output(ctx, "summary.json", nlohmann::json{{"mean_r10", summary}}.dump(2) + "\n");
}

void cmd_curve(Context& ctx, const CascadeOptions& o) {
  const auto src = load_corpus(ctx, o.source);
  const auto tgt = load_corpus(ctx, o.target);
  train::CascadeConfig cc = cascade_config(ctx);
  if (o.image_mode) cc.finetune.mode = enc::VisualMode::kImage;
  nlohmann::json resolved = cascade_json(cc);
  resolved["percents"] = o.percents;
  ctx.manifest.set_config(resolved);
  const auto points = eval::transfer_curve(o.percents, src->input(), tgt->input(), cc, ctx.seed, progress(ctx));
  const std::string csv = eval::transfer_curve_csv(points);
  write_output(ctx, "curve.csv", csv);
  write_output(ctx, "curve.svg", render_curve_svg(csv, o.metric));
  for (const auto& p : points)
    *ctx.out << p.percent << "%: zero-shot R@10 " << p.zero_shot.mean_r10() << ", fine-tuned R@10 "
             << p.finetuned.mean_r10() << "\n";
}

void cmd_plot(Context& ctx, const std::string& csv_path, const std::string& metric) {
  const std::string csv = io::read_file(csv_path);
  ctx.manifest.add_input(csv_path, "csv");
  ctx.manifest.set_config({{"metric", metric}});
  const std::string name = fs::path(csv_path).stem().string() + ".svg";
  write_output(ctx, name, render_curve_svg(csv, metric));
  *ctx.out << (ctx.out_dir / name).string() << "\n";
}

fs::path default_out_dir(const std::string& command) {
  const char* root = std::getenv("AVC_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "avc_runs") / command;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cascaded cross-modal audio-visual retrieval", "avcascade"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool verbose = false;
  std::map<CLI::App*, CLI::Option*> seed_options;
  std::function<void(Context&)> handler;

  auto command = [&](const char* name, const char* help, std::function<void(Context&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory (default $AVC_OUTPUT_ROOT/<command>)");
    seed_options[sub] = sub->add_option("--seed", seed, "seed; overrides the config file");
    sub->add_flag("-v,--verbose", verbose, "print per-epoch progress");
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };

  SynthOptions synth_opt;
  {
    auto* s = command("synth", "generate a bilingual synthetic corpus pair",
                      [&](Context& c) { cmd_synth(c, synth_opt); });
    s->add_option("--languages", synth_opt.languages, "languages, source first")->delimiter(',');
    s->add_option("--videos", synth_opt.videos, "videos per language")->delimiter(',');
    s->add_option("--clips", synth_opt.clips, "clips per video");
    s->add_option("--concepts", synth_opt.concepts, "concepts in the world");
    s->add_option("--variants", synth_opt.variants, "pronunciation variants per concept");
    s->add_option("--tones", synth_opt.tones, "tones per concept sound");
    s->add_option("--shared", synth_opt.shared, "fraction of concepts that sound alike in every language");
    s->add_option("--noise", synth_opt.noise, "noise level");
    s->add_option("--duration", synth_opt.duration, "clip duration in seconds");
    s->add_option("--source-splits", synth_opt.source_splits, "train,val,test fractions")->delimiter(',');
    s->add_option("--target-splits", synth_opt.target_splits, "train,val,test fractions")->delimiter(',');
  }
  BuildOptions build_opt;
  {
    auto* s = command("build-corpus", "segment, filter and split real audio into a corpus",
                      [&](Context& c) { cmd_build_corpus(c, build_opt); });
    s->add_option("--audio-dir", build_opt.audio_dir, "one <video>.wav per video")->required();
    s->add_option("--features-dir", build_opt.features_dir, "one <video>.vfea per video")->required();
    s->add_option("--language", build_opt.language, "language tag")->required();
    s->add_option("--fps-2d", build_opt.fps_2d, "2D feature frames per second");
    s->add_option("--seconds-per-3d", build_opt.seconds_per_3d, "seconds covered by one 3D segment");
    s->add_option("--splits", build_opt.splits, "train,val,test fractions")->delimiter(',');
    s->add_option("--vad-threshold-db", build_opt.vad.energy_threshold_db, "frame energy threshold vs track RMS");
    s->add_option("--min-gap-s", build_opt.vad.min_gap_s, "merge speech regions closer than this");
  }
  std::string pretrain_corpus;
  command("pretrain", "train on a source-language corpus", [&](Context& c) { cmd_pretrain(c, pretrain_corpus); })
      ->add_option("--corpus", pretrain_corpus, "corpus directory or manifest")
      ->required();
  FinetuneOptions ft_opt;
  {
    auto* s = command("finetune", "train on a target-language corpus, from --init or from scratch",
                      [&](Context& c) { cmd_finetune(c, ft_opt); });
    s->add_option("--corpus", ft_opt.corpus, "corpus directory or manifest")->required();
    s->add_option("--init", ft_opt.init, "checkpoint to start from");
    s->add_option("--name", ft_opt.name, "output name (default finetuned, or scratch without --init)");
    s->add_flag("--freeze-visual", ft_opt.freeze_visual, "keep the visual branch fixed");
    s->add_flag("--image-mode", ft_opt.image_mode, "use 2D features only");
  }
  EvalCliOptions zs_opt, ev_opt;
  for (auto* o : {&zs_opt, &ev_opt}) {
    const bool zero = o == &zs_opt;
    auto* s = command(zero ? "zero-shot-eval" : "eval",
                      zero ? "evaluate a source-trained checkpoint on a target corpus" : "evaluate a checkpoint",
                      [o, zero](Context& c) { cmd_eval(c, *o, zero); });
    s->add_option("--checkpoint", o->checkpoint, "checkpoint file")->required();
    s->add_option("--corpus", o->corpus, "corpus directory or manifest")->required();
    s->add_option("--split", o->split, "train, val or test");
    s->add_flag("--image-mode", o->image_mode, "use 2D features only");
    if (!zero) s->add_option("--model", o->model, "label stored in the reports");
  }
  CascadeOptions cas_opt, curve_opt;
  {
    auto* s = command("cascade", "pretrain, zero-shot, fine-tune and scratch baseline",
                      [&](Context& c) { cmd_cascade(c, cas_opt); });
    s->add_option("--source", cas_opt.source, "source-language corpus")->required();
    s->add_option("--target", cas_opt.target, "target-language corpus")->required();
    s->add_option("--pretrained", cas_opt.pretrained, "reuse a pretrained checkpoint");
    s->add_flag("--image-mode", cas_opt.image_mode, "use 2D features only after pretraining");
  }
  {
    auto* s = command("curve", "fine-tuned retrieval vs share of pretraining videos",
                      [&](Context& c) { cmd_curve(c, curve_opt); });
    s->add_option("--source", curve_opt.source, "source-language corpus")->required();
    s->add_option("--target", curve_opt.target, "target-language corpus")->required();
    s->add_option("--percents", curve_opt.percents, "ascending percents of source videos")->delimiter(',');
    s->add_option("--metric", curve_opt.metric, "metric plotted: r1, r5, r10 or med_rank");
    s->add_flag("--image-mode", curve_opt.image_mode, "use 2D features only after pretraining");
  }
  std::string plot_csv, plot_metric = "r10";
  {
    auto* s = command("plot", "render a transfer-curve CSV as SVG",
                      [&](Context& c) { cmd_plot(c, plot_csv, plot_metric); });
    s->add_option("--csv", plot_csv, "curve CSV")->required();
    s->add_option("--metric", plot_metric, "r1, r5, r10 or med_rank");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.command = sub->get_name();
  ctx.args = args;
  ctx.verbose = verbose;
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (!config_path.empty()) {
      ctx.kv = KeyValues::read(config_path);
      ctx.kv.require_known(known_config_keys());
    }
    if (seed_options.at(sub)->count() > 0) ctx.kv.set("seed", std::to_string(seed));
    ctx.seed = ctx.kv.get_u64("seed", 0);
    ctx.out_dir = out_dir.empty() ? default_out_dir(ctx.command) : fs::path(out_dir);
    fs::create_directories(ctx.out_dir);
    ctx.manifest = RunManifest(ctx.command, args);
    ctx.manifest.set_seed(ctx.seed);
    if (!config_path.empty()) ctx.manifest.add_input(config_path, "config");
    handler(ctx);
    ctx.manifest.write(ctx.out_dir);
    return kExitOk;
  } catch (const UsageError& e) {
    err << e.what() << "\n" << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace avc::cli
