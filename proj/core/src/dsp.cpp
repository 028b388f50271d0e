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

#include "avcascade/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"

namespace avc::dsp {

namespace {

constexpr char kMelMagic[4] = {'M', 'E', 'L', 'S'};
constexpr std::uint32_t kMelVersion = 1;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    require(plan_ != nullptr, ErrorCode::kConfiguration, "failed to plan FFT");
  }
  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() noexcept { return in_.get(); }

  /// Power spectrum |X_k|^2 for k = 0..n/2.
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = out_.get()[k][0] * out_.get()[k][0] + out_.get()[k][1] * out_.get()[k][1];
  }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace

std::size_t DspParams::window_samples() const {
  return static_cast<std::size_t>(std::lround(sample_rate_hz * window_ms / 1000.0));
}

std::size_t DspParams::hop_samples() const {
  return static_cast<std::size_t>(std::lround(sample_rate_hz * hop_ms / 1000.0));
}

std::size_t DspParams::max_frames() const {
  const auto samples = static_cast<std::size_t>(std::llround(max_duration_s * sample_rate_hz));
  return frame_count(samples, *this);
}

float DspParams::floor_value() const { return static_cast<float>(std::log(log_floor)); }

void DspParams::validate() const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kConfiguration, "dsp: " + what); };
  if (sample_rate_hz == 0) bad("sample_rate_hz must be positive");
  if (!(window_ms > 0.0) || !(hop_ms > 0.0)) bad("window_ms and hop_ms must be positive");
  if (window_ms < hop_ms) bad("window_ms must be >= hop_ms");
  if (hop_samples() == 0) bad("hop shorter than one sample");
  if (window_samples() > fft_size) bad("window longer than fft_size");
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) bad("fft_size must be a power of two");
  if (mel_bins < 1) bad("mel_bins must be >= 1");
  if (!(fmin_hz >= 0.0) || !(fmax_hz > fmin_hz)) bad("need 0 <= fmin_hz < fmax_hz");
  if (fmax_hz > sample_rate_hz / 2.0) bad("fmax_hz above Nyquist");
  if (!(log_floor > 0.0)) bad("log_floor must be positive");
  if (!(max_duration_s > 0.0)) bad("max_duration_s must be positive");
}

std::size_t frame_count(std::size_t num_samples, const DspParams& params) {
  const std::size_t window = params.window_samples();
  const std::size_t hop = params.hop_samples();
  if (num_samples < window || hop == 0) return 0;
  return (num_samples - window) / hop + 1;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_edges_hz(const DspParams& params) {
  const double lo = hz_to_mel(params.fmin_hz);
  const double hi = hz_to_mel(params.fmax_hz);
  const std::size_t n = params.mel_bins + 2;
  std::vector<double> edges(n);
  for (std::size_t i = 0; i < n; ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return edges;
}

std::vector<double> mel_center_frequencies(const DspParams& params) {
  auto edges = mel_edges_hz(params);
  return {edges.begin() + 1, edges.end() - 1};
}

std::vector<std::vector<double>> mel_filterbank(const DspParams& params) {
  const auto edges = mel_edges_hz(params);
  const std::size_t nbins = params.fft_size / 2 + 1;
  std::vector<std::vector<double>> bank(params.mel_bins, std::vector<double>(nbins, 0.0));
  for (std::size_t m = 0; m < params.mel_bins; ++m) {
    // Triangles are linear in mel, matching the usual speech front-end.
    const double left = hz_to_mel(edges[m]);
    const double center = hz_to_mel(edges[m + 1]);
    const double right = hz_to_mel(edges[m + 2]);
    for (std::size_t k = 0; k < nbins; ++k) {
      const double f = static_cast<double>(k) * params.sample_rate_hz / params.fft_size;
      const double mel = hz_to_mel(f);
      double w = 0.0;
      if (mel > left && mel <= center) w = (mel - left) / (center - left);
      else if (mel > center && mel < right) w = (right - mel) / (right - center);
      bank[m][k] = w;
    }
  }
  return bank;
}

Waveform normalize_audio(const Waveform& wave, std::uint32_t target_rate) {
  require(target_rate > 0, ErrorCode::kInvalidArgument, "target sample rate must be positive");
  require(wave.channels > 0 && wave.sample_rate > 0, ErrorCode::kCorruptAudio,
          "corrupt audio: zero channels or sample rate");
  require(wave.frames() > 0, ErrorCode::kEmptyAudio, "empty audio");
  require(wave.samples.size() % wave.channels == 0, ErrorCode::kCorruptAudio,
          "corrupt audio: sample count not a multiple of channel count");
  for (float s : wave.samples)
    require(std::isfinite(s), ErrorCode::kCorruptAudio, "corrupt audio: non-finite sample");

  const std::size_t n = wave.frames();
  std::vector<float> mono(n);
  if (wave.channels == 1) {
    mono = wave.samples;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::uint32_t c = 0; c < wave.channels; ++c) acc += wave.samples[i * wave.channels + c];
      mono[i] = static_cast<float>(acc / wave.channels);
    }
  }

  Waveform out;
  out.sample_rate = target_rate;
  out.channels = 1;
  if (wave.sample_rate == target_rate) {
    out.samples = std::move(mono);
  } else {
    // Output sample j sits at source position j * src / dst; integer
    // arithmetic keeps the interpolation weights exact.
    const std::uint64_t src = wave.sample_rate, dst = target_rate;
    const std::size_t len = static_cast<std::size_t>((static_cast<std::uint64_t>(n - 1) * dst) / src) + 1;
    out.samples.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
      const std::uint64_t num = static_cast<std::uint64_t>(j) * src;
      const std::size_t i0 = static_cast<std::size_t>(num / dst);
      const double frac = static_cast<double>(num % dst) / static_cast<double>(dst);
      const double a = mono[i0];
      const double b = i0 + 1 < n ? mono[i0 + 1] : mono[i0];
      out.samples[j] = static_cast<float>(a + (b - a) * frac);
    }
  }
  for (float& s : out.samples) s = std::clamp(s, -1.0f, 1.0f);
  return out;
}

MelSpectrogram log_mel(const Waveform& wave, const DspParams& params) {
  params.validate();
  require(wave.channels == 1, ErrorCode::kInvalidArgument, "log_mel expects mono audio");
  require(wave.sample_rate == params.sample_rate_hz, ErrorCode::kInvalidArgument,
          "log_mel: waveform rate " + std::to_string(wave.sample_rate) + " Hz does not match " +
              std::to_string(params.sample_rate_hz) + " Hz");
  const std::size_t window = params.window_samples();
  const std::size_t hop = params.hop_samples();
  const std::size_t frames = frame_count(wave.samples.size(), params);
  require(frames > 0, ErrorCode::kAudioTooShort,
          "audio too short: " + std::to_string(wave.samples.size()) + " samples, need " +
              std::to_string(window));

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / window);

  const auto bank = mel_filterbank(params);
  // Sparse view of the filterbank: each filter touches a contiguous run.
  struct Span {
    std::size_t first = 0, last = 0;
  };
  std::vector<Span> spans(params.mel_bins);
  for (std::size_t m = 0; m < params.mel_bins; ++m) {
    const auto& row = bank[m];
    auto nz = [](double w) { return w != 0.0; };
    auto first = std::find_if(row.begin(), row.end(), nz);
    auto last = std::find_if(row.rbegin(), row.rend(), nz);
    if (first != row.end()) {
      spans[m].first = static_cast<std::size_t>(first - row.begin());
      spans[m].last = static_cast<std::size_t>(row.rend() - last);
    }
  }

  MelSpectrogram spec;
  spec.frames = frames;
  spec.valid_frames = frames;
  spec.bins = params.mel_bins;
  spec.frame_hop_s = static_cast<double>(hop) / params.sample_rate_hz;
  spec.values.resize(frames * params.mel_bins);

  RealFft fft(params.fft_size);
  std::vector<double> power;
  double* in = fft.input();
  for (std::size_t t = 0; t < frames; ++t) {
    const float* x = wave.samples.data() + t * hop;
    for (std::size_t i = 0; i < window; ++i) in[i] = hann[i] * x[i];
    std::fill(in + window, in + params.fft_size, 0.0);
    fft.power(power);
    for (std::size_t m = 0; m < params.mel_bins; ++m) {
      double e = 0.0;
      for (std::size_t k = spans[m].first; k < spans[m].last; ++k) e += bank[m][k] * power[k];
      spec.values[t * params.mel_bins + m] =
          static_cast<float>(std::log(std::max(e, params.log_floor)));
    }
  }
  return spec;
}

MelSpectrogram fit_length(const MelSpectrogram& spec, const DspParams& params) {
  const std::size_t target = params.max_frames();
  MelSpectrogram out = slice_frames(spec, 0, target, params);
  out.valid_frames = std::min(spec.valid_frames, target);
  return out;
}

MelSpectrogram slice_frames(const MelSpectrogram& spec, std::size_t start, std::size_t count,
                            const DspParams& params) {
  MelSpectrogram out;
  out.frames = count;
  out.bins = spec.bins;
  out.frame_hop_s = spec.frame_hop_s;
  out.values.assign(count * spec.bins, params.floor_value());
  const std::size_t avail = start < spec.frames ? spec.frames - start : 0;
  const std::size_t copied = std::min(avail, count);
  std::copy_n(spec.values.begin() + static_cast<std::ptrdiff_t>(std::min(start, spec.frames) * spec.bins),
              copied * spec.bins, out.values.begin());
  const std::size_t valid_avail = start < spec.valid_frames ? spec.valid_frames - start : 0;
  out.valid_frames = std::min(valid_avail, count);
  return out;
}

std::string encode_mel(const MelSpectrogram& spec) {
  io::ByteWriter w;
  w.bytes(std::string_view(kMelMagic, 4));
  w.u32(kMelVersion);
  w.u32(static_cast<std::uint32_t>(spec.frames));
  w.u32(static_cast<std::uint32_t>(spec.bins));
  for (float v : spec.values) w.f32(v);
  return w.take();
}

MelSpectrogram decode_mel(std::string_view bytes) {
  io::ByteReader r(bytes, ErrorCode::kParse, "mel spectrogram");
  require(r.bytes(4) == std::string_view(kMelMagic, 4), ErrorCode::kParse,
          "not a mel spectrogram file (bad magic)");
  const std::uint32_t version = r.u32();
  require(version == kMelVersion, ErrorCode::kUnsupportedVersion,
          "unsupported mel spectrogram version " + std::to_string(version));
  MelSpectrogram spec;
  spec.frames = r.u32();
  spec.bins = r.u32();
  spec.valid_frames = spec.frames;
  require(r.remaining() == spec.frames * spec.bins * sizeof(float), ErrorCode::kParse,
          "mel spectrogram payload size does not match header");
  spec.values.resize(spec.frames * spec.bins);
  for (float& v : spec.values) v = r.f32();
  return spec;
}

void write_mel_file(const std::filesystem::path& path, const MelSpectrogram& spec) {
  io::write_file(path, encode_mel(spec));
}

MelSpectrogram read_mel_file(const std::filesystem::path& path) {
  return decode_mel(io::read_file(path));
}

}  // namespace avc::dsp
