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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "avcascade/encoders.hpp"
#include "avcascade/tensor.hpp"

namespace avc::eval {

enum class Direction { kAudioToVisual, kVisualToAudio };
std::string_view direction_name(Direction direction) noexcept;
Direction parse_direction(std::string_view name);

/// 1-based rank of the true counterpart of every query. Ties count against
/// the query: rank = 1 + #{j : s_j > s_true} + #{j != true : s_j == s_true}.
/// Audio-to-visual queries are rows of S, visual-to-audio queries are columns.
std::vector<std::size_t> pessimistic_ranks(const Tensor& scores, Direction direction);

/// Fraction of queries whose counterpart ranks within the top k; 1 <= k <= n.
double recall_at_k(const Tensor& scores, std::size_t k, Direction direction);
double recall_at_k(const enc::SimilarityMatrix& sim, std::size_t k, Direction direction);

/// Median pessimistic rank; the mean of the two middle ranks for even n.
double median_rank(const Tensor& scores, Direction direction);
double median_rank(const enc::SimilarityMatrix& sim, Direction direction);

inline constexpr std::size_t kReportedRanks[] = {1, 5, 10};

struct RetrievalReport {
  Direction direction = Direction::kAudioToVisual;
  std::size_t n = 0;
  /// k -> recall; k is clamped to n for galleries smaller than 10.
  std::map<std::size_t, double> r_at;
  double median_rank = 0.0;
  std::string model;
  std::string checkpoint_id;
  std::string corpus_id;
  std::string split;

  double recall(std::size_t k) const;
  nlohmann::json to_json() const;
  static RetrievalReport from_json(const nlohmann::json& j);
  friend bool operator==(const RetrievalReport&, const RetrievalReport&) = default;
};

RetrievalReport make_report(const Tensor& scores, Direction direction);

/// Both directions, audio-to-visual first.
struct ReportPair {
  RetrievalReport audio_to_visual;
  RetrievalReport visual_to_audio;

  /// Mean R@10 of the two directions, the single number used for model
  /// selection and trend checks.
  double mean_r10() const;
  nlohmann::json to_json() const;
  static ReportPair from_json(const nlohmann::json& j);
  friend bool operator==(const ReportPair&, const ReportPair&) = default;
};

ReportPair make_reports(const Tensor& scores);

}  // namespace avc::eval
