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

#include "avcascade/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

namespace avc::enc {

namespace {

std::string conv_name(std::size_t layer, const char* what) {
  return std::string(kAudioPrefix) + "conv" + std::to_string(layer + 1) + "." + what;
}

Tensor uniform_fan_in(Shape shape, std::size_t fan_in, CounterRng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = static_cast<float>(rng.uniform(-bound, bound));
  return t;
}

Tensor pooled_input(const std::vector<float>& values, std::size_t rows, std::size_t cols) {
  std::vector<double> v(values.begin(), values.end());
  return Tensor(Shape{rows, cols}, std::move(v));
}

}  // namespace

std::size_t EncoderConfig::min_frames() const {
  std::size_t len = 1;
  for (std::size_t i = 0; i < conv_channels.size(); ++i) len = (len - 1) * stride + kernel;
  return len;
}

void EncoderConfig::validate() const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kConfiguration, "encoder: " + what); };
  if (mel_bins == 0) bad("mel_bins must be positive");
  if (conv_channels.empty()) bad("need at least one conv layer");
  for (auto c : conv_channels)
    if (c == 0) bad("conv channels must be positive");
  if (kernel == 0 || stride == 0) bad("kernel and stride must be positive");
  if (embed_dim == 0 || dim_2d == 0 || dim_3d == 0) bad("dimensions must be positive");
  if (!std::isfinite(input_offset) || !std::isfinite(input_scale) || input_scale == 0.0)
    bad("input standardization must be finite with non-zero scale");
}

nlohmann::json EncoderConfig::to_json() const {
  return {{"mel_bins", mel_bins}, {"conv_channels", conv_channels}, {"kernel", kernel},
          {"stride", stride},     {"embed_dim", embed_dim},         {"dim_2d", dim_2d},
          {"dim_3d", dim_3d},     {"input_offset", input_offset},   {"input_scale", input_scale}};
}

EncoderConfig EncoderConfig::from_json(const nlohmann::json& j) {
  EncoderConfig c;
  try {
    c.mel_bins = j.at("mel_bins").get<std::size_t>();
    c.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
    c.kernel = j.at("kernel").get<std::size_t>();
    c.stride = j.at("stride").get<std::size_t>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.dim_2d = j.at("dim_2d").get<std::size_t>();
    c.dim_3d = j.at("dim_3d").get<std::size_t>();
    c.input_offset = j.at("input_offset").get<double>();
    c.input_scale = j.at("input_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("encoder config: ") + e.what());
  }
  c.validate();
  return c;
}

graph::ParamSet init_params(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  CounterRng rng(seed, fnv1a64("encoder.init"));
  graph::ParamSet params;
  std::size_t cin = config.mel_bins;
  for (std::size_t l = 0; l < config.conv_channels.size(); ++l) {
    const std::size_t cout = config.conv_channels[l];
    const std::size_t fan_in = config.kernel * cin;
    params.add(conv_name(l, "weight"), uniform_fan_in(Shape{cout, config.kernel, cin}, fan_in, rng));
    params.add(conv_name(l, "bias"), uniform_fan_in(Shape{cout}, fan_in, rng));
    cin = cout;
  }
  const std::string a(kAudioPrefix), v(kVisualPrefix);
  params.add(a + "proj.weight", uniform_fan_in(Shape{config.embed_dim, cin}, cin, rng));
  params.add(a + "proj.bias", uniform_fan_in(Shape{config.embed_dim}, cin, rng));
  params.add(v + "proj2d.weight", uniform_fan_in(Shape{config.embed_dim, config.dim_2d}, config.dim_2d, rng));
  params.add(v + "proj2d.bias", uniform_fan_in(Shape{config.embed_dim}, config.dim_2d, rng));
  params.add(v + "proj3d.weight", uniform_fan_in(Shape{config.embed_dim, config.dim_3d}, config.dim_3d, rng));
  params.add(v + "proj3d.bias", uniform_fan_in(Shape{config.embed_dim}, config.dim_3d, rng));
  return params;
}

void check_params(const graph::ParamSet& params, const EncoderConfig& config) {
  const graph::ParamSet expected = init_params(config, 0);
  require(params.size() == expected.size(), ErrorCode::kShapeMismatch,
          "encoder parameters: expected " + std::to_string(expected.size()) + " tensors, found " +
              std::to_string(params.size()));
  for (const auto& [name, entry] : expected.entries()) {
    require(params.contains(name), ErrorCode::kShapeMismatch, "encoder parameters: missing '" + name + "'");
    require(params.value(name).shape() == entry.value.shape(), ErrorCode::kShapeMismatch,
            "encoder parameters: '" + name + "' has shape " + shape_string(params.value(name).shape()) +
                ", expected " + shape_string(entry.value.shape()));
  }
}

graph::Var audio_forward(graph::Graph& g, const graph::ParamSet& params,
                         const dsp::MelSpectrogram& spec, const EncoderConfig& config) {
  require(spec.bins == config.mel_bins, ErrorCode::kConfiguration,
          "audio encoder expects " + std::to_string(config.mel_bins) + " mel bins, got " +
              std::to_string(spec.bins));
  const std::size_t need = config.min_frames();
  require(spec.frames >= need, ErrorCode::kAudioTooShort,
          "audio too short for the encoder: " + std::to_string(spec.frames) + " frames, need " +
              std::to_string(need));
  const std::size_t len = std::min(spec.frames, std::max(spec.valid_frames, need));

  Tensor x(Shape{len, spec.bins});
  for (std::size_t i = 0; i < len * spec.bins; ++i)
    x[i] = (static_cast<double>(spec.values[i]) - config.input_offset) * config.input_scale;

  graph::Var h = g.constant(std::move(x));
  for (std::size_t l = 0; l < config.conv_channels.size(); ++l) {
    h = g.conv1d(h, g.param(params, conv_name(l, "weight")), g.param(params, conv_name(l, "bias")),
                 config.stride);
    h = g.relu(h);
  }
  const std::string a(kAudioPrefix);
  return g.affine(g.mean_time(h), g.param(params, a + "proj.weight"), g.param(params, a + "proj.bias"));
}

graph::Var visual_forward(graph::Graph& g, const graph::ParamSet& params,
                          const VisualFeatures& f, const EncoderConfig& config, VisualMode mode) {
  require(f.frames_2d >= 1, ErrorCode::kEmptyClip, "empty clip: no 2D frames");
  require(f.dim_2d == config.dim_2d, ErrorCode::kConfiguration,
          "visual encoder expects 2D dim " + std::to_string(config.dim_2d) + ", got " +
              std::to_string(f.dim_2d));
  require(f.values_2d.size() == f.frames_2d * f.dim_2d, ErrorCode::kShapeMismatch,
          "visual features: 2D value count does not match dimensions");
  const std::string v(kVisualPrefix);
  graph::Var pooled2d = g.max_time(g.constant(pooled_input(f.values_2d, f.frames_2d, f.dim_2d)));
  graph::Var out = g.affine(pooled2d, g.param(params, v + "proj2d.weight"), g.param(params, v + "proj2d.bias"));
  if (mode == VisualMode::kImage) return out;

  require(f.segments_3d >= 1, ErrorCode::kEmptyClip, "empty clip: no 3D segments in video mode");
  require(f.dim_3d == config.dim_3d, ErrorCode::kConfiguration,
          "visual encoder expects 3D dim " + std::to_string(config.dim_3d) + ", got " +
              std::to_string(f.dim_3d));
  require(f.values_3d.size() == f.segments_3d * f.dim_3d, ErrorCode::kShapeMismatch,
          "visual features: 3D value count does not match dimensions");
  graph::Var pooled3d = g.max_time(g.constant(pooled_input(f.values_3d, f.segments_3d, f.dim_3d)));
  return g.add(out, g.affine(pooled3d, g.param(params, v + "proj3d.weight"), g.param(params, v + "proj3d.bias")));
}

std::vector<double> embed_audio(const dsp::MelSpectrogram& spec, const graph::ParamSet& params,
                                const EncoderConfig& config) {
  graph::Graph g;
  const auto out = g.value(audio_forward(g, params, spec, config)).values();
  return {out.begin(), out.end()};
}

std::vector<double> embed_visual(const VisualFeatures& features, const graph::ParamSet& params,
                                 const EncoderConfig& config, VisualMode mode) {
  graph::Graph g;
  const auto out = g.value(visual_forward(g, params, features, config, mode)).values();
  return {out.begin(), out.end()};
}

SimilarityMatrix similarity_matrix(const Tensor& audio, const Tensor& visual,
                                   std::vector<std::string> video_ids) {
  require(audio.rank() == 2 && visual.rank() == 2, ErrorCode::kShapeMismatch,
          "similarity_matrix expects [B, d] embeddings");
  require(audio.dim(0) == visual.dim(0), ErrorCode::kShapeMismatch,
          "similarity_matrix: batch sizes differ (" + std::to_string(audio.dim(0)) + " vs " +
              std::to_string(visual.dim(0)) + ")");
  require(audio.dim(1) == visual.dim(1), ErrorCode::kShapeMismatch,
          "similarity_matrix: embedding dims differ (" + std::to_string(audio.dim(1)) + " vs " +
              std::to_string(visual.dim(1)) + ")");
  require(video_ids.empty() || video_ids.size() == audio.dim(0), ErrorCode::kShapeMismatch,
          "similarity_matrix: video id count does not match batch size");
  graph::Graph g;
  const auto s = g.matmul_nt(g.constant(audio), g.constant(visual));
  return SimilarityMatrix{g.value(s), std::move(video_ids)};
}

}  // namespace avc::enc
