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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "avcascade/dsp.hpp"
#include "avcascade/graph.hpp"
#include "avcascade/visual_features.hpp"

namespace avc::enc {

/// Shapes of both branches. The audio branch is a stack of unpadded strided
/// 1-D convolutions with rectifiers, mean pooling over time and an affine
/// projection; the visual branch max-pools the 2D (and in video mode the 3D)
/// features over the clip and sums their affine projections.
struct EncoderConfig {
  std::size_t mel_bins = 40;
  std::vector<std::size_t> conv_channels = {32, 64, 64};
  std::size_t kernel = 5;
  std::size_t stride = 2;
  std::size_t embed_dim = 64;
  std::size_t dim_2d = 32;
  std::size_t dim_3d = 16;
  /// Fixed input standardization applied to log-mel cells: (x - offset) * scale.
  double input_offset = 0.0;
  double input_scale = 1.0;

  /// Shortest spectrogram the conv stack accepts.
  std::size_t min_frames() const;
  void validate() const;

  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

inline constexpr std::string_view kAudioPrefix = "audio.";
inline constexpr std::string_view kVisualPrefix = "visual.";

/// Fresh parameters, U(-1/sqrt(fan_in), 1/sqrt(fan_in)), rounded to float.
graph::ParamSet init_params(const EncoderConfig& config, std::uint64_t seed);

/// Throws kShapeMismatch unless params has exactly the shapes config implies.
void check_params(const graph::ParamSet& params, const EncoderConfig& config);

/// Records the audio branch on g. Only the valid (unpadded) frames are
/// encoded, extended to min_frames() when the valid prefix is shorter.
graph::Var audio_forward(graph::Graph& g, const graph::ParamSet& params,
                         const dsp::MelSpectrogram& spec, const EncoderConfig& config);

graph::Var visual_forward(graph::Graph& g, const graph::ParamSet& params,
                          const VisualFeatures& features, const EncoderConfig& config,
                          VisualMode mode);

std::vector<double> embed_audio(const dsp::MelSpectrogram& spec, const graph::ParamSet& params,
                                const EncoderConfig& config);
std::vector<double> embed_visual(const VisualFeatures& features, const graph::ParamSet& params,
                                 const EncoderConfig& config, VisualMode mode);

/// scores(i, j) = <audio_i, visual_j>.
struct SimilarityMatrix {
  Tensor scores;
  std::vector<std::string> video_ids;

  std::size_t size() const { return scores.rank() == 2 ? scores.dim(0) : 0; }
  double operator()(std::size_t i, std::size_t j) const { return scores.at(i, j); }
};

/// audio and visual are [B, d]; video_ids may be empty or of length B.
SimilarityMatrix similarity_matrix(const Tensor& audio, const Tensor& visual,
                                   std::vector<std::string> video_ids = {});

}  // namespace avc::enc
