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

#include "avcascade/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

namespace avc::corpus {

using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

json record_to_json(const ClipRecord& r) {
  return json{{"video_id", r.video_id},
              {"clip_id", r.clip_id},
              {"start_s", r.start_s},
              {"end_s", r.end_s},
              {"split", split_name(r.split)},
              {"language", r.language},
              {"audio_path", r.audio_path},
              {"visual_feature_path", r.visual_feature_path}};
}

ClipRecord record_from_json(const json& j, std::size_t line) {
  static const std::set<std::string> kKeys = {"video_id", "clip_id",  "start_s",    "end_s",
                                              "split",    "language", "audio_path", "visual_feature_path"};
  const auto where = "manifest line " + std::to_string(line) + ": ";
  require(j.is_object(), ErrorCode::kParse, where + "record must be a JSON object");
  for (const auto& [key, value] : j.items())
    require(kKeys.contains(key), ErrorCode::kParse, where + "unexpected key '" + key + "'");
  for (const auto& key : kKeys)
    require(j.contains(key), ErrorCode::kParse, where + "missing key '" + key + "'");
  try {
    ClipRecord r;
    r.video_id = j.at("video_id").get<std::string>();
    r.clip_id = j.at("clip_id").get<std::string>();
    r.start_s = j.at("start_s").get<double>();
    r.end_s = j.at("end_s").get<double>();
    r.split = parse_split(j.at("split").get<std::string>());
    r.language = j.at("language").get<std::string>();
    r.audio_path = j.at("audio_path").get<std::string>();
    r.visual_feature_path = j.at("visual_feature_path").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, where + e.what());
  }
}

}  // namespace

std::string_view split_name(Split split) noexcept {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
    case Split::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  if (name == "unassigned") return Split::kUnassigned;
  fail(ErrorCode::kParse, "unknown split '" + std::string(name) + "'");
}

void VadParams::validate() const {
  require(frame_ms > 0.0, ErrorCode::kConfiguration, "vad: frame_ms must be positive");
  require(min_gap_s >= 0.0, ErrorCode::kConfiguration, "vad: min_gap_s must be non-negative");
  require(min_clip_s < max_clip_s, ErrorCode::kConfiguration, "vad: need min_clip_s < max_clip_s");
}

std::vector<std::string> CorpusManifest::video_ids() const {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.video_id);
  return sorted_unique(std::move(ids));
}

std::vector<std::string> CorpusManifest::video_ids(Split split) const {
  std::vector<std::string> ids;
  for (const auto& r : records)
    if (r.split == split) ids.push_back(r.video_id);
  return sorted_unique(std::move(ids));
}

CorpusManifest CorpusManifest::select(Split split) const {
  CorpusManifest out{{}, language, metadata};
  for (const auto& r : records)
    if (r.split == split) out.records.push_back(r);
  return out;
}

std::size_t CorpusManifest::count(Split split) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [split](const ClipRecord& r) { return r.split == split; }));
}

bool CorpusManifest::per_video_audio() const {
  auto it = metadata.find(kAudioLayoutKey);
  return it != metadata.end() && it->is_string() && it->get<std::string>() == "per_video";
}

std::vector<ClipInterval> segment_speech(const dsp::Waveform& wave, const VadParams& vad) {
  vad.validate();
  require(wave.channels == 1, ErrorCode::kInvalidArgument, "segment_speech expects mono audio");
  require(wave.sample_rate > 0, ErrorCode::kInvalidArgument, "segment_speech: bad sample rate");
  const auto frame = static_cast<std::size_t>(std::lround(vad.frame_ms * wave.sample_rate / 1000.0));
  require(frame > 0, ErrorCode::kConfiguration, "vad: frame shorter than one sample");
  const std::size_t nframes = wave.samples.size() / frame;
  if (nframes == 0) return {};

  double total = 0.0;
  for (float s : wave.samples) total += static_cast<double>(s) * s;
  const double track_rms = std::sqrt(total / static_cast<double>(wave.samples.size()));
  if (!(track_rms > 0.0)) return {};
  const double threshold = track_rms * std::pow(10.0, vad.energy_threshold_db / 20.0);

  std::vector<bool> active(nframes);
  for (std::size_t f = 0; f < nframes; ++f) {
    double e = 0.0;
    for (std::size_t i = f * frame; i < (f + 1) * frame; ++i)
      e += static_cast<double>(wave.samples[i]) * wave.samples[i];
    const double rms = std::sqrt(e / static_cast<double>(frame));
    active[f] = rms > 0.0 && rms > threshold;
  }

  const double frame_s = static_cast<double>(frame) / wave.sample_rate;
  std::vector<ClipInterval> regions;
  for (std::size_t f = 0; f < nframes;) {
    if (!active[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < nframes && active[g]) ++g;
    const ClipInterval next{static_cast<double>(f) * frame_s, static_cast<double>(g) * frame_s};
    if (!regions.empty() && next.start_s - regions.back().end_s < vad.min_gap_s) {
      regions.back().end_s = next.end_s;
    } else {
      regions.push_back(next);
    }
    f = g;
  }
  return regions;
}

std::vector<ClipInterval> filter_clips(std::span<const ClipInterval> intervals, const VadParams& vad) {
  vad.validate();
  std::vector<ClipInterval> out;
  for (const auto& iv : intervals) {
    const double d = iv.duration();
    if (d >= vad.min_clip_s && d <= vad.max_clip_s) out.push_back(iv);
  }
  return out;
}

std::array<std::size_t, 3> apportion(std::size_t total, const SplitFractions& fractions) {
  const std::array<double, 3> f = {fractions.train, fractions.val, fractions.test};
  for (double x : f)
    require(x >= 0.0 && std::isfinite(x), ErrorCode::kInvalidArgument, "split fractions must be non-negative");
  require(std::abs(f[0] + f[1] + f[2] - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
          "split fractions must sum to 1");
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    // Snap to a fine grid so rounding noise cannot break exact ties.
    const double quota = std::round(f[i] * static_cast<double>(total) * 1e9) / 1e9;
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = std::round((quota - static_cast<double>(sizes[i])) * 1e9) / 1e9;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % 3, ++assigned) sizes[order[k]] += 1;
  return sizes;
}

CorpusManifest build_splits(const CorpusManifest& manifest, const SplitFractions& fractions,
                            std::uint64_t seed) {
  require(!manifest.records.empty(), ErrorCode::kEmptyCorpus, "empty corpus");
  for (const auto& r : manifest.records)
    require(r.split == Split::kUnassigned, ErrorCode::kContractViolation,
            "build_splits: clip '" + r.clip_id + "' already has a split");

  auto videos = manifest.video_ids();
  CounterRng rng(seed, fnv1a64("build_splits"));
  rng.shuffle(std::span<std::string>(videos));
  const auto sizes = apportion(videos.size(), fractions);

  std::map<std::string, Split, std::less<>> assignment;
  std::size_t pos = 0;
  const std::array<Split, 3> splits = {Split::kTrain, Split::kVal, Split::kTest};
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t k = 0; k < sizes[s]; ++k) assignment[videos[pos++]] = splits[s];

  CorpusManifest out = manifest;
  for (auto& r : out.records) r.split = assignment.at(r.video_id);
  return out;
}

std::vector<std::string> subsample_order(const CorpusManifest& manifest, std::uint64_t seed) {
  auto videos = manifest.video_ids();
  CounterRng rng(seed, fnv1a64("subsample"));
  rng.shuffle(std::span<std::string>(videos));
  return videos;
}

CorpusManifest subsample(const CorpusManifest& manifest, double percent, std::uint64_t seed) {
  require(percent > 0.0 && percent <= 100.0, ErrorCode::kInvalidArgument,
          "subsample percent must be in (0, 100]");
  const auto order = subsample_order(manifest, seed);
  const auto keep = static_cast<std::size_t>(
      std::llround(percent * static_cast<double>(order.size()) / 100.0));
  require(keep > 0, ErrorCode::kSubsampleTooSmall,
          "subsample too small: " + std::to_string(percent) + "% of " +
              std::to_string(order.size()) + " videos rounds to zero");
  const std::set<std::string, std::less<>> kept(order.begin(),
                                                order.begin() + static_cast<std::ptrdiff_t>(keep));
  CorpusManifest out{{}, manifest.language, manifest.metadata};
  for (const auto& r : manifest.records)
    if (kept.contains(r.video_id)) out.records.push_back(r);
  return out;
}

void validate_manifest(const CorpusManifest& manifest) {
  std::set<std::string, std::less<>> clips;
  std::map<std::string, Split, std::less<>> video_split;
  for (const auto& r : manifest.records) {
    require(clips.insert(r.clip_id).second, ErrorCode::kParse, "duplicate clip id '" + r.clip_id + "'");
    require(r.start_s >= 0.0 && r.start_s < r.end_s, ErrorCode::kParse,
            "clip '" + r.clip_id + "' has an invalid interval");
    auto [it, inserted] = video_split.try_emplace(r.video_id, r.split);
    require(inserted || it->second == r.split, ErrorCode::kParse,
            "video '" + r.video_id + "' appears in more than one split");
  }
}

std::string serialize_manifest(const CorpusManifest& manifest) {
  std::string out;
  json header{{"manifest_version", kManifestVersion}, {"language", manifest.language}};
  if (!manifest.metadata.empty()) header["metadata"] = manifest.metadata;
  out += header.dump();
  out += '\n';
  for (const auto& r : manifest.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

CorpusManifest parse_manifest(std::string_view text) {
  CorpusManifest m;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      require(j.is_object() && j.contains("manifest_version"), ErrorCode::kParse,
              "manifest must start with a header line");
      require(j.at("manifest_version") == kManifestVersion, ErrorCode::kUnsupportedVersion,
              "unsupported manifest version " + j.at("manifest_version").dump());
      m.language = j.value("language", std::string());
      if (j.contains("metadata")) m.metadata = j.at("metadata");
      have_header = true;
      continue;
    }
    m.records.push_back(record_from_json(j, line_no));
  }
  require(have_header, ErrorCode::kParse, "manifest is empty (no header line)");
  validate_manifest(m);
  return m;
}

void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
  io::write_file(path, serialize_manifest(manifest));
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(io::read_file(path));
}

std::string manifest_id(const CorpusManifest& manifest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_manifest(manifest))));
  return buf;
}

}  // namespace avc::corpus
