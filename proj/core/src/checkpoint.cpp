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

#include "avcascade/checkpoint.hpp"

#include <cmath>
#include <cstdio>

#include "avcascade/binary_io.hpp"
#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

namespace avc::train {

namespace {

constexpr std::string_view kMagic = "AVCK";

nlohmann::json stage_to_json(const StageRecord& s) {
  return {{"stage", s.stage},   {"corpus_id", s.corpus_id}, {"language", s.language},
          {"seed", s.seed},     {"epochs", s.epochs},       {"best_epoch", s.best_epoch}};
}

StageRecord stage_from_json(const nlohmann::json& j) {
  return {j.at("stage").get<std::string>(), j.at("corpus_id").get<std::string>(),
          j.at("language").get<std::string>(), j.at("seed").get<std::uint64_t>(),
          j.at("epochs").get<std::size_t>(), j.at("best_epoch").get<std::size_t>()};
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& s : ckpt.provenance) prov.push_back(stage_to_json(s));
  nlohmann::json frozen = nlohmann::json::array();
  for (const auto& [name, e] : ckpt.params.entries())
    if (e.frozen) frozen.push_back(name);
  const nlohmann::json meta = {{"encoder", ckpt.encoder.to_json()},
                               {"config", ckpt.config},
                               {"provenance", std::move(prov)},
                               {"rng", {{"seed", ckpt.rng.seed}, {"epoch", ckpt.rng.epoch}}},
                               {"frozen", std::move(frozen)},
                               {"num_params", ckpt.params.size()}};
  const std::string meta_text = meta.dump();

  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(Checkpoint::kVersion);
  w.u32(static_cast<std::uint32_t>(meta_text.size()));
  w.bytes(meta_text);
  for (const auto& [name, e] : ckpt.params.entries()) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(e.value.rank()));
    for (std::size_t d : e.value.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : e.value.values()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  require(bytes.size() >= kMagic.size() && bytes.substr(0, kMagic.size()) == kMagic,
          ErrorCode::kNotACheckpoint, "not a checkpoint: bad magic bytes");
  io::ByteReader r(bytes, ErrorCode::kCorruptCheckpoint, "corrupt checkpoint");
  r.skip(kMagic.size());
  const std::uint32_t version = r.u32();
  require(version == Checkpoint::kVersion, ErrorCode::kUnsupportedVersion,
          "unsupported version: checkpoint format " + std::to_string(version) + ", expected " +
              std::to_string(Checkpoint::kVersion));

  Checkpoint ckpt;
  std::size_t num_params = 0;
  std::vector<std::string> frozen;
  try {
    const std::uint32_t meta_len = r.u32();
    const auto meta = nlohmann::json::parse(r.bytes(meta_len));
    ckpt.encoder = enc::EncoderConfig::from_json(meta.at("encoder"));
    ckpt.config = meta.at("config");
    for (const auto& s : meta.at("provenance")) ckpt.provenance.push_back(stage_from_json(s));
    ckpt.rng = {meta.at("rng").at("seed").get<std::uint64_t>(), meta.at("rng").at("epoch").get<std::uint64_t>()};
    frozen = meta.at("frozen").get<std::vector<std::string>>();
    num_params = meta.at("num_params").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptCheckpoint, std::string("corrupt checkpoint: bad metadata: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw;
    fail(ErrorCode::kCorruptCheckpoint, std::string("corrupt checkpoint: ") + e.what());
  }

  for (std::size_t p = 0; p < num_params; ++p) {
    const std::string name(r.bytes(r.u32()));
    const std::uint32_t rank = r.u32();
    require(rank <= 8, ErrorCode::kCorruptCheckpoint, "corrupt checkpoint: implausible rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    const std::size_t count = shape_size(shape);
    require(count <= r.remaining() / sizeof(float), ErrorCode::kCorruptCheckpoint,
            "corrupt checkpoint: truncated parameter '" + name + "'");
    std::vector<double> values(count);
    for (auto& v : values) {
      v = r.f32();
      require(std::isfinite(v), ErrorCode::kCorruptCheckpoint,
              "corrupt checkpoint: non-finite value in '" + name + "'");
    }
    require(!ckpt.params.contains(name), ErrorCode::kCorruptCheckpoint,
            "corrupt checkpoint: duplicate parameter '" + name + "'");
    ckpt.params.add(name, Tensor(std::move(shape), std::move(values)));
  }
  require(r.remaining() == 0, ErrorCode::kCorruptCheckpoint, "corrupt checkpoint: trailing bytes");
  for (const auto& name : frozen) {
    require(ckpt.params.contains(name), ErrorCode::kCorruptCheckpoint,
            "corrupt checkpoint: frozen flag names unknown parameter '" + name + "'");
    ckpt.params.set_frozen(name, true);
  }
  try {
    enc::check_params(ckpt.params, ckpt.encoder);
  } catch (const Error& e) {
    fail(ErrorCode::kCorruptCheckpoint, std::string("corrupt checkpoint: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  io::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

std::string checkpoint_id(const Checkpoint& ckpt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(encode_checkpoint(ckpt))));
  return buf;
}

}  // namespace avc::train
