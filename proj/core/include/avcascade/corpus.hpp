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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "avcascade/dsp.hpp"

namespace avc::corpus {

struct ClipInterval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const noexcept { return end_s - start_s; }
  friend bool operator==(const ClipInterval&, const ClipInterval&) = default;
};

enum class Split { kTrain, kVal, kTest, kUnassigned };

std::string_view split_name(Split split) noexcept;
Split parse_split(std::string_view name);

struct ClipRecord {
  std::string video_id;
  std::string clip_id;
  double start_s = 0.0;
  double end_s = 0.0;
  Split split = Split::kUnassigned;
  std::string language;
  std::string audio_path;
  std::string visual_feature_path;

  double duration() const noexcept { return end_s - start_s; }
  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

/// Energy detector settings. The 5 s / 50 s clip bounds are inclusive.
struct VadParams {
  double frame_ms = 30.0;
  /// A frame is active when its RMS exceeds the track RMS by this many dB
  /// (negative values sit below the track level).
  double energy_threshold_db = -30.0;
  /// Active regions closer than this are merged.
  double min_gap_s = 0.3;
  double min_clip_s = 5.0;
  double max_clip_s = 50.0;

  void validate() const;
};

/// Metadata key naming how audio_path relates to a clip: "per_clip" files
/// hold exactly the clip, "per_video" files hold the whole video and the
/// clip is cut at [start_s, end_s).
inline constexpr std::string_view kAudioLayoutKey = "audio_layout";

struct CorpusManifest {
  std::vector<ClipRecord> records;
  std::string language;
  nlohmann::json metadata = nlohmann::json::object();

  /// Sorted, de-duplicated video ids.
  std::vector<std::string> video_ids() const;
  std::vector<std::string> video_ids(Split split) const;
  /// Records of one split, order preserved.
  CorpusManifest select(Split split) const;
  std::size_t count(Split split) const;
  bool per_video_audio() const;

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

/// Energy-based speech activity detection over fixed frames.
std::vector<ClipInterval> segment_speech(const dsp::Waveform& wave, const VadParams& vad);

/// Keeps intervals with min_clip_s <= duration <= max_clip_s; never crops.
std::vector<ClipInterval> filter_clips(std::span<const ClipInterval> intervals, const VadParams& vad);

struct SplitFractions {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

/// Largest-remainder apportionment of total items; fractional ties go to
/// the earlier split (train, then val, then test).
std::array<std::size_t, 3> apportion(std::size_t total, const SplitFractions& fractions);

/// Shuffles videos with a seeded stream and partitions them by fractions.
/// Every clip inherits its video's split.
CorpusManifest build_splits(const CorpusManifest& manifest, const SplitFractions& fractions,
                            std::uint64_t seed);

/// Keeps round(percent% of videos) chosen as a prefix of a seeded
/// permutation, so smaller percentages nest inside larger ones.
CorpusManifest subsample(const CorpusManifest& manifest, double percent, std::uint64_t seed);

/// Video ids in the seeded order subsample() draws from.
std::vector<std::string> subsample_order(const CorpusManifest& manifest, std::uint64_t seed);

/// Checks unique clip ids and video-disjoint splits.
void validate_manifest(const CorpusManifest& manifest);

/// Line-delimited JSON: a header line then one record per line.
std::string serialize_manifest(const CorpusManifest& manifest);
CorpusManifest parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Stable content fingerprint (hex) of the serialized manifest.
std::string manifest_id(const CorpusManifest& manifest);

}  // namespace avc::corpus
