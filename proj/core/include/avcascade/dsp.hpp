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
#include <vector>

namespace avc::dsp {

/// Interleaved PCM samples in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  std::uint32_t sample_rate = 16000;
  std::uint32_t channels = 1;

  std::size_t frames() const noexcept { return channels ? samples.size() / channels : 0; }
  double duration_s() const noexcept {
    return sample_rate ? static_cast<double>(frames()) / sample_rate : 0.0;
  }
};

/// Front-end constants. Defaults are conventional speech settings and can be
/// overridden from configuration.
struct DspParams {
  std::uint32_t sample_rate_hz = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t fft_size = 512;
  std::size_t mel_bins = 40;
  double fmin_hz = 20.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-10;
  double max_duration_s = 50.0;

  std::size_t window_samples() const;
  std::size_t hop_samples() const;
  /// Frames produced by a max_duration_s signal (4998 with the defaults).
  std::size_t max_frames() const;
  /// log(log_floor) as stored in a spectrogram cell.
  float floor_value() const;
  void validate() const;
};

/// Time-major grid of natural-log mel energies.
///
/// valid_frames counts the leading frames computed from real audio; frames
/// past it are padding added by fit_length. Encoders pool over the valid
/// prefix only.
struct MelSpectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<float> values;
  double frame_hop_s = 0.01;
  std::size_t valid_frames = 0;

  float at(std::size_t frame, std::size_t bin) const noexcept { return values[frame * bins + bin]; }

  friend bool operator==(const MelSpectrogram&, const MelSpectrogram&) = default;
};

/// floor((num_samples - window) / hop) + 1, or 0 when shorter than a window.
std::size_t frame_count(std::size_t num_samples, const DspParams& params);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// mel_bins + 2 edge frequencies, uniform on the mel scale over [fmin, fmax].
std::vector<double> mel_edges_hz(const DspParams& params);
/// Peak frequency of each triangular filter.
std::vector<double> mel_center_frequencies(const DspParams& params);
/// Triangular weights, mel_bins rows by fft_size / 2 + 1 columns.
std::vector<std::vector<double>> mel_filterbank(const DspParams& params);

/// Mono mix-down, linear-interpolation resample, clamp to [-1, 1].
Waveform normalize_audio(const Waveform& wave, std::uint32_t target_rate);

/// Hann-windowed power STFT -> mel filterbank -> log(max(energy, log_floor)).
MelSpectrogram log_mel(const Waveform& wave, const DspParams& params);

/// Pads with floor_value() or keeps the leading frames so the result has
/// exactly max_frames() frames.
MelSpectrogram fit_length(const MelSpectrogram& spec, const DspParams& params);

/// Frames [start, start + count) with floor padding past the end.
MelSpectrogram slice_frames(const MelSpectrogram& spec, std::size_t start, std::size_t count,
                            const DspParams& params);

/// "MELS" file: magic, version u32, frames u32, bins u32, then row-major f32.
std::string encode_mel(const MelSpectrogram& spec);
MelSpectrogram decode_mel(std::string_view bytes);
void write_mel_file(const std::filesystem::path& path, const MelSpectrogram& spec);
MelSpectrogram read_mel_file(const std::filesystem::path& path);

}  // namespace avc::dsp
