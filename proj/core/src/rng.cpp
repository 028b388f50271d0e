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

#include "avcascade/rng.hpp"

#include <cmath>
#include <numbers>

#include "avcascade/error.hpp"

namespace avc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return splitmix64(seed ^ fnv1a64(label));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + kGolden));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
    : seed_(seed), stream_(stream), counter_(counter),
      key_(splitmix64(seed) ^ splitmix64(stream * kGolden + 1)) {}

std::uint64_t CounterRng::next_u64() noexcept {
  return splitmix64(key_ + kGolden * counter_++);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyAudio: return "empty audio";
    case ErrorCode::kCorruptAudio: return "corrupt audio";
    case ErrorCode::kAudioTooShort: return "audio too short";
    case ErrorCode::kEmptyCorpus: return "empty corpus";
    case ErrorCode::kSubsampleTooSmall: return "subsample too small";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kConfiguration: return "configuration error";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kEmptyClip: return "empty clip";
    case ErrorCode::kEmptySplit: return "empty split";
    case ErrorCode::kNotACheckpoint: return "not a checkpoint";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kCorruptCheckpoint: return "corrupt checkpoint";
    case ErrorCode::kNumerical: return "numerical error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown";
}

}  // namespace avc
