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
#include <numbers>
#include <vector>

#include "avcascade/dsp.hpp"
#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

using avc::ErrorCode;
using avc::dsp::DspParams;
using avc::dsp::MelSpectrogram;
using avc::dsp::Waveform;

namespace {

Waveform sine(double hz, double seconds, double amplitude = 1.0, std::uint32_t rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * i / rate));
  return w;
}

Waveform noise(std::size_t n, std::uint64_t seed, double scale = 0.3) {
  avc::CounterRng rng(seed);
  Waveform w;
  w.samples.resize(n);
  for (float& s : w.samples) s = static_cast<float>(std::clamp(scale * rng.normal(), -1.0, 1.0));
  return w;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const avc::Error& e) {
    return e.code();
  }
  FAIL("expected an avc::Error");
  return ErrorCode::kIo;
}

// Straight-from-the-definition spectral front end: O(N^2) DFT and HTK
// triangles evaluated in Hz space.
std::vector<double> oracle_frame(const std::vector<float>& x, std::size_t start) {
  const double rate = 16000.0;
  const std::size_t win = 400, nfft = 512, bins = 40;
  std::vector<std::complex<double>> X(nfft / 2 + 1);
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < win; ++n) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / win));
      acc += w * x[start + n] * std::polar(1.0, -2.0 * std::numbers::pi * k * n / nfft);
    }
    X[k] = acc;
  }
  auto mel = [](double f) { return 1127.0 * std::log(1.0 + f / 700.0); };
  const double lo = mel(20.0), hi = mel(8000.0);
  std::vector<double> out(bins);
  for (std::size_t m = 0; m < bins; ++m) {
    const double l = lo + (hi - lo) * m / (bins + 1);
    const double c = lo + (hi - lo) * (m + 1) / (bins + 1);
    const double r = lo + (hi - lo) * (m + 2) / (bins + 1);
    double e = 0.0;
    for (std::size_t k = 0; k <= nfft / 2; ++k) {
      const double f = mel(k * rate / nfft);
      double w = 0.0;
      if (f > l && f <= c) w = (f - l) / (c - l);
      else if (f > c && f < r) w = (r - f) / (r - c);
      e += w * std::norm(X[k]);
    }
    out[m] = std::log(std::max(e, 1e-10));
  }
  return out;
}

}  // namespace

TEST_CASE("default constants") {
  DspParams p;
  CHECK(p.window_samples() == 400);
  CHECK(p.hop_samples() == 160);
  CHECK(p.max_frames() == 4998);
  CHECK(p.floor_value() == static_cast<float>(std::log(1e-10)));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("invalid dsp params are configuration errors") {
  auto check = [](auto mutate) {
    DspParams p;
    mutate(p);
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::kConfiguration);
  };
  check([](DspParams& p) { p.hop_ms = 30.0; });
  check([](DspParams& p) { p.fmax_hz = 9000.0; });
  check([](DspParams& p) { p.mel_bins = 0; });
  check([](DspParams& p) { p.fft_size = 300; });
  check([](DspParams& p) { p.log_floor = 0.0; });
}

TEST_CASE("normalize_audio: mono at the target rate is bit-identical") {
  Waveform w = noise(5000, 1);
  const Waveform out = avc::dsp::normalize_audio(w, 16000);
  CHECK(out.channels == 1);
  CHECK(out.sample_rate == 16000);
  CHECK(out.samples == w.samples);
}

TEST_CASE("normalize_audio: stereo x and -x mixes to silence") {
  const Waveform m = noise(3000, 2);
  Waveform st;
  st.channels = 2;
  for (float s : m.samples) {
    st.samples.push_back(s);
    st.samples.push_back(-s);
  }
  const Waveform out = avc::dsp::normalize_audio(st, 16000);
  REQUIRE(out.samples.size() == m.samples.size());
  for (float s : out.samples) CHECK(s == 0.0f);
}

TEST_CASE("normalize_audio: 48 kHz to 16 kHz matches a linear interpolation oracle") {
  Waveform w = noise(48000, 3);
  w.sample_rate = 48000;
  const Waveform out = avc::dsp::normalize_audio(w, 16000);
  REQUIRE(out.samples.size() == 16000);
  for (std::size_t j = 0; j < out.samples.size(); ++j) {
    const double pos = j * 48000.0 / 16000.0;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - i;
    const double b = i + 1 < w.samples.size() ? w.samples[i + 1] : w.samples[i];
    const double expect = w.samples[i] + (b - w.samples[i]) * frac;
    REQUIRE(std::abs(out.samples[j] - expect) < 1e-6);
  }
}

TEST_CASE("normalize_audio: upsampling interpolates between neighbours") {
  Waveform w;
  w.sample_rate = 8000;
  w.samples = {0.0f, 1.0f, -1.0f};
  const Waveform out = avc::dsp::normalize_audio(w, 16000);
  REQUIRE(out.samples.size() == 5);
  const std::vector<float> expect = {0.0f, 0.5f, 1.0f, 0.0f, -1.0f};
  CHECK(out.samples == expect);
}

TEST_CASE("normalize_audio clamps to [-1, 1]") {
  Waveform w;
  w.samples = {1.5f, -2.0f, 0.25f};
  const Waveform out = avc::dsp::normalize_audio(w, 16000);
  CHECK(out.samples == std::vector<float>{1.0f, -1.0f, 0.25f});
}

TEST_CASE("normalize_audio errors") {
  Waveform empty;
  CHECK(code_of([&] { avc::dsp::normalize_audio(empty, 16000); }) == ErrorCode::kEmptyAudio);
  Waveform bad = noise(100, 4);
  bad.samples[17] = std::nanf("");
  CHECK(code_of([&] { avc::dsp::normalize_audio(bad, 16000); }) == ErrorCode::kCorruptAudio);
  bad.samples[17] = INFINITY;
  CHECK(code_of([&] { avc::dsp::normalize_audio(bad, 16000); }) == ErrorCode::kCorruptAudio);
  CHECK(code_of([&] { avc::dsp::normalize_audio(noise(10, 5), 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("log_mel: 10 s at 16 kHz gives 998 x 40") {
  const MelSpectrogram s = avc::dsp::log_mel(noise(160000, 6), DspParams{});
  CHECK(s.frames == 998);
  CHECK(s.bins == 40);
  CHECK(s.valid_frames == 998);
  CHECK(s.values.size() == 998 * 40);
  CHECK(s.frame_hop_s == doctest::Approx(0.01));
}

TEST_CASE("log_mel: silence sits on the floor") {
  Waveform w;
  w.samples.assign(16000, 0.0f);
  const MelSpectrogram s = avc::dsp::log_mel(w, DspParams{});
  for (float v : s.values) REQUIRE(v == static_cast<float>(std::log(1e-10)));
}

TEST_CASE("log_mel: 1 kHz sine peaks in the bin whose centre is nearest 1 kHz") {
  const Waveform w = sine(1000.0, 0.2);
  const MelSpectrogram s = avc::dsp::log_mel(w, DspParams{});

  // Nearest centre computed from the oracle's own mel grid.
  auto mel = [](double f) { return 1127.0 * std::log(1.0 + f / 700.0); };
  const double lo = mel(20.0), hi = mel(8000.0);
  std::size_t nearest = 0;
  double best = INFINITY;
  for (std::size_t m = 0; m < 40; ++m) {
    const double c = lo + (hi - lo) * (m + 1) / 41.0;
    const double hz = 700.0 * (std::exp(c / 1127.0) - 1.0);
    if (std::abs(hz - 1000.0) < best) {
      best = std::abs(hz - 1000.0);
      nearest = m;
    }
  }

  for (std::size_t t = 0; t < s.frames; ++t) {
    const auto oracle = oracle_frame(w.samples, t * 160);
    const auto oracle_arg = static_cast<std::size_t>(std::max_element(oracle.begin(), oracle.end()) - oracle.begin());
    const float* row = s.values.data() + t * 40;
    const auto arg = static_cast<std::size_t>(std::max_element(row, row + 40) - row);
    CHECK(oracle_arg == nearest);
    CHECK(arg == nearest);
    for (std::size_t m = 0; m < 40; ++m) REQUIRE(row[m] == doctest::Approx(oracle[m]).epsilon(1e-5));
  }
}

TEST_CASE("log_mel agrees with the DFT oracle on noise") {
  const Waveform w = noise(2000, 7);
  const MelSpectrogram s = avc::dsp::log_mel(w, DspParams{});
  for (std::size_t t = 0; t < s.frames; t += 3) {
    const auto oracle = oracle_frame(w.samples, t * 160);
    for (std::size_t m = 0; m < 40; ++m) REQUIRE(s.at(t, m) == doctest::Approx(oracle[m]).epsilon(1e-5));
  }
}

TEST_CASE("log_mel errors") {
  CHECK(code_of([] { avc::dsp::log_mel(noise(399, 8), DspParams{}); }) == ErrorCode::kAudioTooShort);
  CHECK_NOTHROW(avc::dsp::log_mel(noise(400, 8), DspParams{}));
  Waveform st = noise(800, 9);
  st.channels = 2;
  CHECK(code_of([&] { avc::dsp::log_mel(st, DspParams{}); }) == ErrorCode::kInvalidArgument);
  Waveform slow = noise(800, 9);
  slow.sample_rate = 8000;
  CHECK(code_of([&] { avc::dsp::log_mel(slow, DspParams{}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("frame count formula holds for random lengths") {
  DspParams p;
  avc::CounterRng rng(10);
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 400 + rng.below(6000);
    const MelSpectrogram s = avc::dsp::log_mel(noise(n, 100 + i), p);
    REQUIRE(s.frames == (n - 400) / 160 + 1);
  }
  for (std::size_t n = 0; n < 400; ++n) REQUIRE(avc::dsp::frame_count(n, p) == 0);
}

TEST_CASE("appending fewer than one hop of zeros never changes existing frames") {
  avc::CounterRng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Waveform base = noise(400 + rng.below(4000), 200 + i);
    const MelSpectrogram a = avc::dsp::log_mel(base, DspParams{});
    Waveform longer = base;
    longer.samples.resize(base.samples.size() + 1 + rng.below(159), 0.0f);
    const MelSpectrogram b = avc::dsp::log_mel(longer, DspParams{});
    if (b.frames == a.frames) {
      REQUIRE(b == a);
    } else {
      // The zeros completed one more window; every earlier frame is unchanged.
      REQUIRE(b.frames == a.frames + 1);
      REQUIRE(std::equal(a.values.begin(), a.values.end(), b.values.begin()));
    }
  }
}

TEST_CASE("scaling a waveform up never lowers a cell") {
  avc::CounterRng rng(12);
  for (int i = 0; i < 10; ++i) {
    const Waveform w = noise(3000, 300 + i, 0.1);
    Waveform louder = w;
    const double c = 1.0 + 4.0 * rng.uniform();
    for (float& s : louder.samples) s = static_cast<float>(s * c);
    const MelSpectrogram a = avc::dsp::log_mel(w, DspParams{});
    const MelSpectrogram b = avc::dsp::log_mel(louder, DspParams{});
    for (std::size_t k = 0; k < a.values.size(); ++k) REQUIRE(b.values[k] >= a.values[k]);
  }
}

TEST_CASE("every cell is at least the log floor") {
  const MelSpectrogram s = avc::dsp::log_mel(noise(4000, 13, 1e-7), DspParams{});
  for (float v : s.values) REQUIRE(v >= DspParams{}.floor_value());
}

TEST_CASE("fit_length pads, crops and is idempotent") {
  DspParams p;
  const MelSpectrogram ten_s = avc::dsp::log_mel(noise(160000, 14), p);
  const MelSpectrogram padded = avc::dsp::fit_length(ten_s, p);
  REQUIRE(padded.frames == 4998);
  CHECK(padded.valid_frames == 998);
  CHECK(std::equal(ten_s.values.begin(), ten_s.values.end(), padded.values.begin()));
  for (std::size_t k = 998 * 40; k < padded.values.size(); ++k)
    REQUIRE(padded.values[k] == static_cast<float>(std::log(1e-10)));

  MelSpectrogram big;
  big.frames = big.valid_frames = 6000;
  big.bins = 40;
  big.values.resize(6000 * 40);
  avc::CounterRng rng(15);
  for (float& v : big.values) v = static_cast<float>(rng.normal());
  const MelSpectrogram cropped = avc::dsp::fit_length(big, p);
  REQUIRE(cropped.frames == 4998);
  CHECK(cropped.valid_frames == 4998);
  CHECK(std::equal(cropped.values.begin(), cropped.values.end(), big.values.begin()));

  CHECK(avc::dsp::fit_length(cropped, p) == cropped);
  CHECK(avc::dsp::fit_length(padded, p) == padded);
}

TEST_CASE("fit_length of a 50 s clip is 4998 frames") {
  DspParams p;
  const MelSpectrogram s = avc::dsp::fit_length(avc::dsp::log_mel(noise(800000, 16), p), p);
  CHECK(s.frames == 4998);
}

TEST_CASE("slice_frames pads past the end") {
  DspParams p;
  const MelSpectrogram s = avc::dsp::log_mel(noise(2000, 17), p);
  const MelSpectrogram tail = avc::dsp::slice_frames(s, s.frames - 2, 5, p);
  CHECK(tail.frames == 5);
  CHECK(tail.valid_frames == 2);
  CHECK(tail.at(1, 3) == s.at(s.frames - 1, 3));
  CHECK(tail.at(2, 3) == p.floor_value());
}

TEST_CASE("mel scale and filterbank") {
  for (double hz : {0.0, 20.0, 440.0, 1000.0, 8000.0})
    CHECK(avc::dsp::mel_to_hz(avc::dsp::hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-12));
  CHECK(avc::dsp::hz_to_mel(1000.0) == doctest::Approx(1000.0).epsilon(1e-3));

  DspParams p;
  const auto centres = avc::dsp::mel_center_frequencies(p);
  REQUIRE(centres.size() == 40);
  CHECK(std::is_sorted(centres.begin(), centres.end()));
  CHECK(centres.front() > 20.0);
  CHECK(centres.back() < 8000.0);

  const auto bank = avc::dsp::mel_filterbank(p);
  REQUIRE(bank.size() == 40);
  for (const auto& row : bank) {
    REQUIRE(row.size() == 257);
    CHECK(*std::max_element(row.begin(), row.end()) <= 1.0);
    CHECK(*std::max_element(row.begin(), row.end()) > 0.0);
    for (double w : row) REQUIRE(w >= 0.0);
  }
}

TEST_CASE("MELS files round-trip and reject corruption") {
  const MelSpectrogram s = avc::dsp::log_mel(noise(3000, 18), DspParams{});
  const std::string bytes = avc::dsp::encode_mel(s);
  REQUIRE(bytes.size() == 16 + s.values.size() * 4);
  CHECK(bytes.substr(0, 4) == "MELS");
  const MelSpectrogram back = avc::dsp::decode_mel(bytes);
  CHECK(back.frames == s.frames);
  CHECK(back.bins == s.bins);
  CHECK(back.values == s.values);

  CHECK(code_of([&] { avc::dsp::decode_mel(bytes.substr(0, bytes.size() - 1)); }) == ErrorCode::kParse);
  std::string wrong = bytes;
  wrong[0] = 'X';
  CHECK(code_of([&] { avc::dsp::decode_mel(wrong); }) == ErrorCode::kParse);
  std::string future = bytes;
  future[4] = 9;
  CHECK(code_of([&] { avc::dsp::decode_mel(future); }) == ErrorCode::kUnsupportedVersion);
}
