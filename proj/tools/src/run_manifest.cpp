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


#include "run_manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "avcascade/error.hpp"

namespace avc::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx.get(), digest, &len) == 1,
          ErrorCode::kIo, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)) {}

void RunManifest::add_input(const std::filesystem::path& path, std::string kind) {
  inputs_.push_back({{"path", path.generic_string()}, {"kind", std::move(kind)}, {"sha256", file_sha256(path)}});
}

void RunManifest::add_output(const std::filesystem::path& out_dir, const std::string& rel) {
  outputs_.push_back({{"path", rel}, {"sha256", file_sha256(out_dir / rel)}});
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool", "avcascade"},
          {"command", command_},
          {"args", args_},
          {"seed", seed_},
          {"config", config_},
          {"config_sha256", sha256_hex(config_.dump())},
          {"inputs", inputs_},
          {"outputs", outputs_}};
}

void RunManifest::write(const std::filesystem::path& out_dir) const {
  const auto path = out_dir / "run_manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << to_json().dump(2) << "\n";
  require(out.good(), ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace avc::cli
