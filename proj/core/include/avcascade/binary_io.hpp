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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "avcascade/error.hpp"

namespace avc::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts need byte swapping");

/// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.append(s); }
  void u16(std::uint16_t v) { pod(v); }
  void u32(std::uint32_t v) { pod(v); }
  void i16(std::int16_t v) { pod(v); }
  void u64(std::uint64_t v) { pod(v); }
  void f32(float v) { pod(v); }

  const std::string& buffer() const noexcept { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  template <typename T>
  void pod(T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf_.append(raw, sizeof(T));
  }
  std::string buf_;
};

/// Bounds-checked little-endian reader. Running off the end throws with the
/// error code supplied at construction.
class ByteReader {
 public:
  ByteReader(std::string_view data, ErrorCode truncated_code, std::string what)
      : data_(data), code_(truncated_code), what_(std::move(what)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint16_t u16() { return pod<std::uint16_t>(); }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::int16_t i16() { return pod<std::int16_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  float f32() { return pod<float>(); }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  void skip(std::size_t n) { bytes(n); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(code_, what_ + ": truncated data");
  }
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  ErrorCode code_;
  std::string what_;
};

/// Whole-file read; throws kIo naming the path when the file is missing.
std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes (truncate + write).
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace avc::io
