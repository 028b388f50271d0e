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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "avcascade/binary_io.hpp"
#include "avcascade/corpus.hpp"
#include "avcascade/error.hpp"
#include "avcascade/synth.hpp"
#include "avcascade/wav.hpp"
#include "test_support.hpp"

using avc::ErrorCode;
using avc::synth::SynthParams;

namespace {

SynthParams small_params(std::uint64_t seed = 1) {
  SynthParams p;
  p.num_videos = 4;
  p.clips_per_video = 3;
  p.clip_duration_s = 1.0;
  p.num_concepts = 10;
  p.seed = seed;
  return p;
}

ErrorCode validate_code(const SynthParams& p) {
  try {
    p.validate();
  } catch (const avc::Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

// Frequencies (Hz) of the `count` strongest local maxima of a Hann-windowed
// naive DFT over the first n samples.
std::vector<double> dominant_peaks(const std::vector<float>& x, std::size_t count) {
  const std::size_t n = 4000;  // 4 Hz resolution at 16 kHz
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      acc += w * x[i] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * i % n) / n);
    }
    mag[k] = std::abs(acc);
  }
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < mag.size(); ++k)
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) peaks.push_back(k);
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  peaks.resize(std::min(count, peaks.size()));
  std::vector<double> hz;
  for (std::size_t k : peaks) hz.push_back(k * 16000.0 / n);
  std::sort(hz.begin(), hz.end());
  return hz;
}

std::size_t first_clip_with(const SynthParams& p, std::size_t c) {
  for (std::size_t i = 0; i < p.num_videos * p.clips_per_video; ++i)
    if (avc::synth::clip_concept(p, i) == c) return i;
  FAIL("no clip with concept " << c);
  return 0;
}

std::string slurp(const std::filesystem::path& p) { return avc::io::read_file(p); }

}  // namespace

TEST_CASE("params validation") {
  CHECK(validate_code(small_params()) == ErrorCode::kIo);
  auto p = small_params();
  p.num_concepts = 1;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.shared_concept_fraction = 1.5;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.noise_sigma = -0.1;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.tone_fmax_hz = 9000.0;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.tone_fmin_hz = 10.0;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.language = "fr";
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
  p = small_params();
  p.variants_per_concept = 0;
  CHECK(validate_code(p) == ErrorCode::kConfiguration);
}

TEST_CASE("codebook invariants over many worlds") {
  avc::CounterRng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    SynthParams p = small_params(rng.next_u64());
    p.num_concepts = 2 + rng.below(20);
    p.shared_concept_fraction = trial % 10 == 0 ? 0.0 : trial % 10 == 1 ? 1.0 : rng.uniform();
    p.tones_per_concept = 1 + rng.below(3);
    p.variants_per_concept = 1 + rng.below(3);
    const auto n_shared = static_cast<std::size_t>(std::llround(p.shared_concept_fraction * p.num_concepts));
    const auto book = avc::synth::build_codebook(p);
    INFO("C=" << p.num_concepts << " rho=" << p.shared_concept_fraction);
    REQUIRE(book.shared.size() == n_shared);
    REQUIRE(book.variants() == p.variants_per_concept);

    for (const auto& lang : p.languages) {
      std::set<double> used;
      std::size_t total = 0;
      for (std::size_t c = 0; c < p.num_concepts; ++c) {
        for (std::size_t v = 0; v < p.variants_per_concept; ++v) {
          const auto& tones = book.variant_tones(lang, c, v);
          REQUIRE(tones.size() == p.tones_per_concept);
          for (double f : tones) {
            REQUIRE(f > p.tone_fmin_hz);
            REQUIRE(f < p.tone_fmax_hz);
            used.insert(f);
          }
          total += tones.size();
        }
      }
      // Disjoint across concepts and variants within a language.
      REQUIRE(used.size() == total);
    }
    for (std::size_t c = 0; c < p.num_concepts; ++c) {
      const auto en = book.concept_tones("en", c);
      const auto ja = book.concept_tones("ja", c);
      if (book.is_shared(c)) {
        REQUIRE(en == ja);
      } else {
        std::vector<double> common;
        std::set_intersection(en.begin(), en.end(), ja.begin(), ja.end(), std::back_inserter(common));
        REQUIRE(common.empty());
      }
    }
    // Same seed, same rho and C: identical codebook.
    REQUIRE(avc::synth::build_codebook(p).tones == book.tones);
  }
}

TEST_CASE("each language uses the same sound inventory") {
  SynthParams p = small_params(3);
  p.num_concepts = 12;
  const auto book = avc::synth::build_codebook(p);
  std::set<std::vector<double>> en, ja;
  for (std::size_t c = 0; c < p.num_concepts; ++c) {
    en.insert(book.concept_tones("en", c));
    ja.insert(book.concept_tones("ja", c));
  }
  CHECK(en == ja);
}

TEST_CASE("codebook lookups reject bad indices") {
  const auto book = avc::synth::build_codebook(small_params());
  auto code = [&](auto f) {
    try {
      f();
    } catch (const avc::Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  CHECK(code([&] { book.concept_tones("fr", 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code([&] { book.variant_tones("en", 99, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code([&] { book.variant_tones("en", 0, 5); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("generation is deterministic down to the bytes on disk") {
  const SynthParams p = small_params(7);
  avc::testing::TempDir a("synth-a"), b("synth-b");
  avc::synth::write_corpus(avc::synth::generate_corpus(p), a.path());
  avc::synth::write_corpus(avc::synth::generate_corpus(p), b.path());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.path());
    REQUIRE(slurp(entry.path()) == slurp(b.path() / rel));
    ++files;
  }
  CHECK(files == 2 * 12 + 1);
}

TEST_CASE("files on disk read back to the in-memory corpus") {
  const SynthParams p = small_params(8);
  const auto corpus = avc::synth::generate_corpus(p);
  avc::testing::TempDir dir("synth-read");
  avc::synth::write_corpus(corpus, dir.path());
  const auto m = avc::corpus::read_manifest(dir / "manifest.jsonl");
  CHECK(m == corpus.manifest);
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    REQUIRE(avc::dsp::read_wav(dir.path() / m.records[i].audio_path).samples == corpus.audio[i].samples);
    REQUIRE(avc::enc::read_visual_file(dir.path() / m.records[i].visual_feature_path) == corpus.visual[i]);
  }
}

TEST_CASE("with zero noise nearest centroid recovers every concept") {
  SynthParams p = small_params(9);
  p.noise_sigma = 0.0;
  p.num_videos = 10;
  const auto world = avc::synth::build_world(p);
  const auto corpus = avc::synth::generate_corpus(p);
  for (std::size_t i = 0; i < corpus.visual.size(); ++i) {
    const auto& f = corpus.visual[i];
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t c = 0; c < p.num_concepts; ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < p.feature_dim_2d; ++j) {
        const double diff = f.values_2d[j] - world.visual.centroids_2d.at(c, j);
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    REQUIRE(best == corpus.concepts[i]);
  }
}

TEST_CASE("dominant peaks: shared concepts match across languages, others differ") {
  SynthParams en = small_params(11);
  en.num_videos = 30;
  en.noise_sigma = 0.05;
  SynthParams ja = en;
  ja.language = "ja";
  const auto en_world = avc::synth::build_world(en);
  const auto ja_world = avc::synth::build_world(ja);
  const auto& book = en_world.codebook;
  REQUIRE(!book.shared.empty());

  std::size_t shared_c = book.shared.front();
  std::size_t private_c = 0;
  while (book.is_shared(private_c)) ++private_c;

  for (std::size_t c : {shared_c, private_c}) {
    const auto a = avc::synth::render_clip(en_world, first_clip_with(en, c));
    const auto b = avc::synth::render_clip(ja_world, first_clip_with(ja, c));
    const auto pa = dominant_peaks(a.audio.samples, en.tones_per_concept);
    const auto pb = dominant_peaks(b.audio.samples, ja.tones_per_concept);
    // Peaks land within one DFT bin of the codebook tones.
    const auto ta = book.concept_tones("en", c);
    const auto tb = book.concept_tones("ja", c);
    for (std::size_t k = 0; k < pa.size(); ++k) {
      CHECK(std::abs(pa[k] - ta[k]) <= 4.0);
      CHECK(std::abs(pb[k] - tb[k]) <= 4.0);
    }
    if (book.is_shared(c)) {
      CHECK(pa == pb);
    } else {
      for (double f : pa)
        for (double g : pb) CHECK(std::abs(f - g) > 8.0);
    }
  }
}

TEST_CASE("clips render independently of order and match the manifest") {
  const SynthParams p = small_params(12);
  const auto world = avc::synth::build_world(p);
  const auto corpus = avc::synth::generate_corpus(p);
  const auto& concept_of = corpus.manifest.metadata.at("concept_of");
  for (std::size_t i = corpus.manifest.records.size(); i-- > 0;) {
    const auto clip = avc::synth::render_clip(world, i);
    REQUIRE(clip.record == corpus.manifest.records[i]);
    REQUIRE(clip.audio.samples == corpus.audio[i].samples);
    REQUIRE(clip.visual == corpus.visual[i]);
    REQUIRE(concept_of.at(clip.record.clip_id).get<std::size_t>() == clip.concept_index);
    REQUIRE(avc::synth::clip_concept(p, i) == clip.concept_index);
    for (float s : clip.audio.samples) REQUIRE(avc::dsp::quantize_pcm16(s) == s);
  }
  CHECK_THROWS_AS(avc::synth::clip_record(p, 12), avc::Error);
}

TEST_CASE("manifest satisfies the corpus invariants") {
  SynthParams p = small_params(13);
  p.num_videos = 25;
  p.clip_duration_s = 5.0;
  const auto m = avc::synth::generate_manifest(p);
  CHECK(m.language == "en");
  CHECK(m.records.size() == 75);
  CHECK(m.video_ids().size() == 25);
  for (const auto& r : m.records) {
    CHECK(r.language == "en");
    CHECK(r.duration() >= 5.0);
    CHECK(r.duration() <= 50.0);
  }
  const auto split = avc::corpus::build_splits(m, avc::corpus::SplitFractions{}, 3);
  CHECK_NOTHROW(avc::corpus::validate_manifest(split));
  CHECK(avc::corpus::parse_manifest(avc::corpus::serialize_manifest(split)) == split);
}

TEST_CASE("corpus name keys the clip draws but not the world") {
  SynthParams a = small_params(14);
  a.num_videos = 20;
  SynthParams b = a;
  b.corpus_name = "extra";
  CHECK(avc::synth::build_codebook(a).tones == avc::synth::build_codebook(b).tones);
  std::size_t same = 0;
  for (std::size_t i = 0; i < 60; ++i) same += avc::synth::clip_concept(a, i) == avc::synth::clip_concept(b, i);
  CHECK(same < 30);
  CHECK(avc::synth::clip_record(b, 0).video_id.rfind("extra", 0) == 0);
}
