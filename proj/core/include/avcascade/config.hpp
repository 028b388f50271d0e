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
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace avc::config {

/// Flat "key = value" configuration. Blank lines and lines starting with '#'
/// are ignored; keys may repeat only if later values are meant to win.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text, const std::string& origin = "<config>");
  static KeyValues read(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  bool has(std::string_view key) const;

  std::string get_string(std::string_view key, const std::string& fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  std::size_t get_size(std::string_view key, std::size_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  /// Comma-separated list.
  std::vector<std::string> get_list(std::string_view key, const std::vector<std::string>& fallback) const;

  /// Throws kConfiguration naming the first key not in allowed.
  void require_known(const std::set<std::string, std::less<>>& allowed) const;

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return values_; }
  std::string serialize() const;

 private:
  const std::string* find(std::string_view key) const;
  std::map<std::string, std::string, std::less<>> values_;
  std::string origin_ = "<config>";
};

}  // namespace avc::config
