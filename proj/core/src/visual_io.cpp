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

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"
#include "avcascade/visual_features.hpp"

namespace avc::enc {

namespace {
constexpr char kMagic[4] = {'V', 'F', 'E', 'A'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string_view visual_mode_name(VisualMode mode) noexcept {
  return mode == VisualMode::kImage ? "image" : "video";
}

VisualMode parse_visual_mode(std::string_view name) {
  if (name == "video") return VisualMode::kVideo;
  if (name == "image") return VisualMode::kImage;
  fail(ErrorCode::kParse, "unknown visual mode '" + std::string(name) + "'");
}

std::string encode_visual(const VisualFeatures& f) {
  require(f.values_2d.size() == f.frames_2d * f.dim_2d && f.values_3d.size() == f.segments_3d * f.dim_3d,
          ErrorCode::kShapeMismatch, "visual features: value count does not match dimensions");
  io::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(f.dim_2d));
  w.u32(static_cast<std::uint32_t>(f.dim_3d));
  w.u32(static_cast<std::uint32_t>(f.frames_2d));
  w.u32(static_cast<std::uint32_t>(f.segments_3d));
  for (float v : f.values_2d) w.f32(v);
  for (float v : f.values_3d) w.f32(v);
  return w.take();
}

VisualFeatures decode_visual(std::string_view bytes) {
  io::ByteReader r(bytes, ErrorCode::kParse, "visual features");
  require(r.bytes(4) == std::string_view(kMagic, 4), ErrorCode::kParse,
          "not a visual feature file (bad magic)");
  const std::uint32_t version = r.u32();
  require(version == kVersion, ErrorCode::kUnsupportedVersion,
          "unsupported visual feature version " + std::to_string(version));
  VisualFeatures f;
  f.dim_2d = r.u32();
  f.dim_3d = r.u32();
  f.frames_2d = r.u32();
  f.segments_3d = r.u32();
  const std::size_t n2 = f.frames_2d * f.dim_2d, n3 = f.segments_3d * f.dim_3d;
  require(r.remaining() == (n2 + n3) * sizeof(float), ErrorCode::kParse,
          "visual feature payload size does not match header");
  f.values_2d.resize(n2);
  for (float& v : f.values_2d) v = r.f32();
  f.values_3d.resize(n3);
  for (float& v : f.values_3d) v = r.f32();
  return f;
}

void write_visual_file(const std::filesystem::path& path, const VisualFeatures& features) {
  io::write_file(path, encode_visual(features));
}

VisualFeatures read_visual_file(const std::filesystem::path& path) {
  return decode_visual(io::read_file(path));
}

}  // namespace avc::enc
