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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace avc::enc {

enum class VisualMode { kVideo, kImage };

std::string_view visual_mode_name(VisualMode mode) noexcept;
VisualMode parse_visual_mode(std::string_view name);

/// Per-clip outputs of the frozen visual backbones: frames_2d rows of dim_2d
/// (one per sampled frame) and segments_3d rows of dim_3d (one per clip
/// segment). Both grids are row-major.
struct VisualFeatures {
  std::size_t frames_2d = 0;
  std::size_t dim_2d = 0;
  std::vector<float> values_2d;
  std::size_t segments_3d = 0;
  std::size_t dim_3d = 0;
  std::vector<float> values_3d;

  friend bool operator==(const VisualFeatures&, const VisualFeatures&) = default;
};

/// "VFEA" file: magic, version u32, D2 u32, D3 u32, then frame count u32 and
/// segment count u32, then the 2D rows followed by the 3D rows as
/// little-endian f32.
std::string encode_visual(const VisualFeatures& features);
VisualFeatures decode_visual(std::string_view bytes);
void write_visual_file(const std::filesystem::path& path, const VisualFeatures& features);
VisualFeatures read_visual_file(const std::filesystem::path& path);

}  // namespace avc::enc
