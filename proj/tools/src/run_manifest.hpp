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
#include <vector>

#include <nlohmann/json.hpp>

namespace avc::cli {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Provenance record written next to every command's outputs. Holds no
/// timestamps or host details so identical invocations produce identical
/// bytes.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args);

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  /// Fully resolved configuration; its hash is recorded alongside.
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void add_input(const std::filesystem::path& path, std::string kind);
  /// rel is relative to the output directory.
  void add_output(const std::filesystem::path& out_dir, const std::string& rel);

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::uint64_t seed_ = 0;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
};

}  // namespace avc::cli
