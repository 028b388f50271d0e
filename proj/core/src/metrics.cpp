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

#include "avcascade/metrics.hpp"

#include <algorithm>

#include "avcascade/error.hpp"

namespace avc::eval {

std::string_view direction_name(Direction direction) noexcept {
  return direction == Direction::kAudioToVisual ? "audio_to_visual" : "visual_to_audio";
}

Direction parse_direction(std::string_view name) {
  if (name == "audio_to_visual") return Direction::kAudioToVisual;
  if (name == "visual_to_audio") return Direction::kVisualToAudio;
  fail(ErrorCode::kParse, "unknown retrieval direction '" + std::string(name) + "'");
}

std::vector<std::size_t> pessimistic_ranks(const Tensor& s, Direction direction) {
  require(s.rank() == 2 && s.dim(0) == s.dim(1), ErrorCode::kShapeMismatch,
          "retrieval metrics need a square score matrix, got " + shape_string(s.shape()));
  const std::size_t n = s.dim(0);
  const bool rows = direction == Direction::kAudioToVisual;
  std::vector<std::size_t> ranks(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double truth = s.at(q, q);
    std::size_t rank = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == q) continue;
      const double v = rows ? s.at(q, j) : s.at(j, q);
      if (v >= truth) ++rank;
    }
    ranks[q] = rank;
  }
  return ranks;
}

double recall_at_k(const Tensor& scores, std::size_t k, Direction direction) {
  const auto ranks = pessimistic_ranks(scores, direction);
  require(k >= 1 && k <= ranks.size(), ErrorCode::kInvalidArgument,
          "recall_at_k: k = " + std::to_string(k) + " outside [1, " + std::to_string(ranks.size()) + "]");
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double recall_at_k(const enc::SimilarityMatrix& sim, std::size_t k, Direction direction) {
  return recall_at_k(sim.scores, k, direction);
}

double median_rank(const Tensor& scores, Direction direction) {
  auto ranks = pessimistic_ranks(scores, direction);
  require(!ranks.empty(), ErrorCode::kInvalidArgument, "median_rank of an empty gallery");
  std::sort(ranks.begin(), ranks.end());
  const std::size_t n = ranks.size();
  if (n % 2 == 1) return static_cast<double>(ranks[n / 2]);
  return 0.5 * static_cast<double>(ranks[n / 2 - 1] + ranks[n / 2]);
}

double median_rank(const enc::SimilarityMatrix& sim, Direction direction) {
  return median_rank(sim.scores, direction);
}

double RetrievalReport::recall(std::size_t k) const {
  auto it = r_at.find(std::min(k, n));
  require(it != r_at.end(), ErrorCode::kInvalidArgument, "report has no R@" + std::to_string(k));
  return it->second;
}

nlohmann::json RetrievalReport::to_json() const {
  nlohmann::json r = nlohmann::json::object();
  for (const auto& [k, v] : r_at) r[std::to_string(k)] = v;
  return {{"direction", direction_name(direction)},
          {"n", n},
          {"r_at", std::move(r)},
          {"median_rank", median_rank},
          {"model", model},
          {"checkpoint_id", checkpoint_id},
          {"corpus_id", corpus_id},
          {"split", split}};
}

RetrievalReport RetrievalReport::from_json(const nlohmann::json& j) {
  RetrievalReport r;
  try {
    r.direction = parse_direction(j.at("direction").get<std::string>());
    r.n = j.at("n").get<std::size_t>();
    for (const auto& [k, v] : j.at("r_at").items()) r.r_at[std::stoul(k)] = v.get<double>();
    r.median_rank = j.at("median_rank").get<double>();
    r.model = j.at("model").get<std::string>();
    r.checkpoint_id = j.at("checkpoint_id").get<std::string>();
    r.corpus_id = j.at("corpus_id").get<std::string>();
    r.split = j.at("split").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("retrieval report: ") + e.what());
  } catch (const std::logic_error& e) {
    fail(ErrorCode::kParse, std::string("retrieval report: bad rank key: ") + e.what());
  }
  return r;
}

RetrievalReport make_report(const Tensor& scores, Direction direction) {
  auto ranks = pessimistic_ranks(scores, direction);
  require(!ranks.empty(), ErrorCode::kInvalidArgument, "cannot report on an empty gallery");
  RetrievalReport r;
  r.direction = direction;
  r.n = ranks.size();
  for (std::size_t k : kReportedRanks) {
    const std::size_t kk = std::min(k, r.n);
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [kk](std::size_t x) { return x <= kk; });
    r.r_at[kk] = static_cast<double>(hits) / static_cast<double>(r.n);
  }
  std::sort(ranks.begin(), ranks.end());
  const std::size_t n = ranks.size();
  r.median_rank = n % 2 == 1 ? static_cast<double>(ranks[n / 2])
                             : 0.5 * static_cast<double>(ranks[n / 2 - 1] + ranks[n / 2]);
  return r;
}

double ReportPair::mean_r10() const {
  return 0.5 * (audio_to_visual.recall(10) + visual_to_audio.recall(10));
}

nlohmann::json ReportPair::to_json() const {
  return {{"audio_to_visual", audio_to_visual.to_json()}, {"visual_to_audio", visual_to_audio.to_json()}};
}

ReportPair ReportPair::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("audio_to_visual") && j.contains("visual_to_audio"),
          ErrorCode::kParse, "report pair: expected both directions");
  return {RetrievalReport::from_json(j.at("audio_to_visual")),
          RetrievalReport::from_json(j.at("visual_to_audio"))};
}

ReportPair make_reports(const Tensor& scores) {
  return {make_report(scores, Direction::kAudioToVisual), make_report(scores, Direction::kVisualToAudio)};
}

}  // namespace avc::eval
