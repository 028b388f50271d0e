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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "avcascade/encoders.hpp"
#include "avcascade/graph.hpp"

namespace avc::train {

/// One training stage that contributed to a checkpoint.
struct StageRecord {
  std::string stage;  // "init", "pretrain" or "finetune"
  std::string corpus_id;
  std::string language;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

/// Where the data order of the producing stage stopped.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  friend bool operator==(const RngState&, const RngState&) = default;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  enc::EncoderConfig encoder;
  graph::ParamSet params;  // frozen flags are part of the state
  nlohmann::json config = nlohmann::json::object();  // snapshot of the last stage config
  std::vector<StageRecord> provenance;
  RngState rng;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// "AVCK", version u32, u32-length-prefixed JSON metadata, then for every
/// parameter in name order: u32 name length, name, u32 rank, u32 dims, and
/// little-endian f32 values.
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Hex fingerprint of the encoded checkpoint.
std::string checkpoint_id(const Checkpoint& ckpt);

}  // namespace avc::train
