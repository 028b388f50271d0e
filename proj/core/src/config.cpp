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

#include "avcascade/config.hpp"

#include <charconv>

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"

namespace avc::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorCode::kParse,
            origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    require(!key.empty(), ErrorCode::kParse, origin + ":" + std::to_string(line_no) + ": empty key");
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues KeyValues::read(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

void KeyValues::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

bool KeyValues::has(std::string_view key) const { return find(key) != nullptr; }

const std::string* KeyValues::find(std::string_view key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string KeyValues::get_string(std::string_view key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double KeyValues::get_double(std::string_view key, double fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  require(ec == std::errc{} && ptr == v->data() + v->size(), ErrorCode::kConfiguration,
          origin_ + ": '" + std::string(key) + "' is not a number: " + *v);
  return out;
}

std::uint64_t KeyValues::get_u64(std::string_view key, std::uint64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  require(ec == std::errc{} && ptr == v->data() + v->size(), ErrorCode::kConfiguration,
          origin_ + ": '" + std::string(key) + "' is not a non-negative integer: " + *v);
  return out;
}

std::size_t KeyValues::get_size(std::string_view key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool KeyValues::get_bool(std::string_view key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  fail(ErrorCode::kConfiguration, origin_ + ": '" + std::string(key) + "' is not a boolean: " + *v);
}

std::vector<std::string> KeyValues::get_list(std::string_view key,
                                             const std::vector<std::string>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  std::string_view rest = *v;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void KeyValues::require_known(const std::set<std::string, std::less<>>& allowed) const {
  for (const auto& [k, v] : values_)
    require(allowed.contains(k), ErrorCode::kConfiguration, origin_ + ": unknown key '" + k + "'");
}

std::string KeyValues::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace avc::config
