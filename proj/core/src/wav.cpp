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

#include "avcascade/wav.hpp"

#include <algorithm>
#include <cmath>

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"

namespace avc::dsp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

float quantize_pcm16(float sample) noexcept {
  const float clamped = std::clamp(sample, -1.0f, 1.0f);
  return static_cast<float>(std::lround(clamped * 32767.0f)) / 32767.0f;
}

Waveform decode_wav(std::string_view bytes) {
  io::ByteReader r(bytes, ErrorCode::kCorruptAudio, "wav");
  require(r.bytes(4) == "RIFF", ErrorCode::kCorruptAudio, "corrupt audio: missing RIFF header");
  r.u32();
  require(r.bytes(4) == "WAVE", ErrorCode::kCorruptAudio, "corrupt audio: not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::string_view payload;
  bool have_data = false;
  while (r.remaining() >= 8 && !have_data) {
    const auto id = r.bytes(4);
    const std::uint32_t size = r.u32();
    const auto body = r.bytes(std::min<std::size_t>(size, r.remaining()));
    if ((size & 1u) && r.remaining() > 0) r.skip(1);
    if (id == "fmt ") {
      io::ByteReader f(body, ErrorCode::kCorruptAudio, "wav fmt chunk");
      format = f.u16();
      channels = f.u16();
      rate = f.u32();
      f.u32();  // byte rate
      f.u16();  // block align
      bits = f.u16();
      if (format == kFormatExtensible) {
        f.u16();  // cbSize
        f.u16();  // valid bits
        f.u32();  // channel mask
        format = f.u16();  // leading two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      payload = body;
      have_data = true;
    }
  }
  require(have_fmt, ErrorCode::kCorruptAudio, "corrupt audio: missing fmt chunk");
  require(have_data, ErrorCode::kCorruptAudio, "corrupt audio: missing data chunk");
  require(channels > 0 && rate > 0, ErrorCode::kCorruptAudio, "corrupt audio: bad fmt chunk");

  Waveform wave;
  wave.channels = channels;
  wave.sample_rate = rate;
  io::ByteReader d(payload, ErrorCode::kCorruptAudio, "wav data");
  if (format == kFormatPcm && bits == 16) {
    wave.samples.resize(payload.size() / 2);
    for (float& s : wave.samples) s = static_cast<float>(d.i16()) / 32767.0f;
  } else if (format == kFormatFloat && bits == 32) {
    wave.samples.resize(payload.size() / 4);
    for (float& s : wave.samples) s = d.f32();
  } else {
    fail(ErrorCode::kCorruptAudio, "unsupported wav encoding (format " + std::to_string(format) +
                                       ", " + std::to_string(bits) + " bits)");
  }
  wave.samples.resize(wave.samples.size() - wave.samples.size() % channels);
  for (float& s : wave.samples) s = std::max(s, -1.0f);
  return wave;
}

std::string encode_wav(const Waveform& wave, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t block = wave.channels * (bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * (bits / 8));
  io::ByteWriter w;
  w.bytes("RIFF");
  w.u32(36 + data_bytes);
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  w.u16(pcm ? kFormatPcm : kFormatFloat);
  w.u16(static_cast<std::uint16_t>(wave.channels));
  w.u32(wave.sample_rate);
  w.u32(wave.sample_rate * block);
  w.u16(static_cast<std::uint16_t>(block));
  w.u16(bits);
  w.bytes("data");
  w.u32(data_bytes);
  for (float s : wave.samples) {
    if (pcm) {
      w.i16(static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0f, 1.0f) * 32767.0f)));
    } else {
      w.f32(s);
    }
  }
  return w.take();
}

Waveform read_wav(const std::filesystem::path& path) { return decode_wav(io::read_file(path)); }

void write_wav(const std::filesystem::path& path, const Waveform& wave, WavEncoding encoding) {
  io::write_file(path, encode_wav(wave, encoding));
}

}  // namespace avc::dsp
