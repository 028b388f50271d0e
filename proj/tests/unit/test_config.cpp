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


#include <doctest.h>

#include <string>

#include "avcascade/config.hpp"
#include "avcascade/error.hpp"
#include "avcascade/trainer.hpp"
#include "test_support.hpp"

using avc::ErrorCode;
using avc::config::KeyValues;
using avc::train::StageConfig;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const avc::Error& e) {
    return e.code();
  }
  FAIL("expected an avc::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("key-value parsing") {
  const auto kv = KeyValues::parse(
      "# comment\n"
      "\n"
      "  lr = 1e-3  \n"
      "epochs=4\r\n"
      "name = a = b\n"
      "percents = 10, 25 ,50,,100\n"
      "flag = yes\n"
      "lr = 2e-3\n");
  CHECK(kv.get_double("lr", 0.0) == 2e-3);
  CHECK(kv.get_size("epochs", 0) == 4);
  CHECK(kv.get_string("name", "") == "a = b");
  CHECK(kv.get_list("percents", {}) == std::vector<std::string>{"10", "25", "50", "100"});
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_u64("absent", 7) == 7);
  CHECK(!kv.has("absent"));
  CHECK(KeyValues::parse(kv.serialize()).entries() == kv.entries());
}

TEST_CASE("key-value errors name the origin") {
  try {
    KeyValues::parse("a = 1\nno equals sign\n", "run.cfg");
    FAIL("no error");
  } catch (const avc::Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  CHECK(code_of([] { KeyValues::parse(" = 3\n"); }) == ErrorCode::kParse);

  const auto kv = KeyValues::parse("x = abc\nn = -3\nb = maybe\n");
  CHECK(code_of([&] { kv.get_double("x", 0.0); }) == ErrorCode::kConfiguration);
  CHECK(code_of([&] { kv.get_u64("n", 0); }) == ErrorCode::kConfiguration);
  CHECK(code_of([&] { kv.get_bool("b", false); }) == ErrorCode::kConfiguration);
  CHECK(code_of([&] { kv.require_known({"x", "n"}); }) == ErrorCode::kConfiguration);
  CHECK_NOTHROW(kv.require_known({"x", "n", "b"}));

  CHECK(code_of([] { KeyValues::read("/nonexistent/run.cfg"); }) == ErrorCode::kIo);
}

TEST_CASE("stage config defaults: 128 x 32 pretraining, 256-clip fine-tuning") {
  const StageConfig p = StageConfig::pretrain_defaults();
  CHECK(p.stage == avc::train::Stage::kPretrain);
  CHECK(p.videos_per_batch == 128);
  CHECK(p.clips_per_video == 32);
  CHECK(p.batch_clips() == 4096);
  CHECK(p.clip_len_s == 10.0);
  CHECK(p.lr == 1e-4);
  CHECK(p.margin == 0.001);
  CHECK(p.epochs == 15);

  const StageConfig f = StageConfig::finetune_defaults();
  CHECK(f.stage == avc::train::Stage::kFinetune);
  CHECK(f.batch_clips() == 256);
  CHECK(f.epochs == 30);
}

TEST_CASE("stage config from key-values, json round trip, validation") {
  const auto kv = KeyValues::parse(
      "stage = finetune\nflat_batch_clips = 64\nlr = 1e-3\nfreeze_visual = true\nmode = image\nseed = 42\n");
  kv.require_known(StageConfig::known_keys());
  const StageConfig c = StageConfig::from_key_values(kv, StageConfig::pretrain_defaults());
  CHECK(c.stage == avc::train::Stage::kFinetune);
  CHECK(c.flat_batch_clips == 64);
  CHECK(c.lr == 1e-3);
  CHECK(c.freeze_visual);
  CHECK(c.mode == avc::enc::VisualMode::kImage);
  CHECK(c.seed == 42);
  CHECK(c.videos_per_batch == 128);
  CHECK(StageConfig::from_json(c.to_json()) == c);

  auto bad = [](auto mutate) {
    StageConfig s;
    mutate(s);
    return code_of([&] { s.validate(); });
  };
  CHECK(bad([](StageConfig& s) { s.lr = 0.0; }) == ErrorCode::kConfiguration);
  CHECK(bad([](StageConfig& s) { s.epochs = 0; }) == ErrorCode::kConfiguration);
  CHECK(bad([](StageConfig& s) { s.margin = -1.0; }) == ErrorCode::kConfiguration);
  CHECK(bad([](StageConfig& s) { s.flat_batch_clips = 0; }) == ErrorCode::kConfiguration);
  CHECK(code_of([] { avc::train::parse_stage("warmup"); }) == ErrorCode::kConfiguration);
}
