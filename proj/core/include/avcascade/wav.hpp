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

#include <filesystem>
#include <string>
#include <string_view>

#include "avcascade/dsp.hpp"

namespace avc::dsp {

enum class WavEncoding { kPcm16, kFloat32 };

/// Parses RIFF/WAVE with 16-bit integer or 32-bit float samples, any channel
/// count. WAVE_FORMAT_EXTENSIBLE headers are accepted.
Waveform decode_wav(std::string_view bytes);
std::string encode_wav(const Waveform& wave, WavEncoding encoding = WavEncoding::kPcm16);

Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding = WavEncoding::kPcm16);

/// Rounds a sample to the nearest representable 16-bit PCM level.
float quantize_pcm16(float sample) noexcept;

}  // namespace avc::dsp
