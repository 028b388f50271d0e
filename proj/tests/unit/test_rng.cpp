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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

using avc::CounterRng;

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  CounterRng a(42, 7);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 10; ++i) first.push_back(a.next_u64());

  CounterRng resumed(42, 7, 5);
  for (int i = 5; i < 10; ++i) CHECK(resumed.next_u64() == first[static_cast<std::size_t>(i)]);

  CounterRng other_stream(42, 8);
  CHECK(other_stream.next_u64() != first[0]);
  CounterRng other_seed(43, 7);
  CHECK(other_seed.next_u64() != first[0]);
}

TEST_CASE("uniform draws lie in [0, 1) with the right mean") {
  CounterRng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // Standard error of the mean is sqrt(1/12/n) ~ 6.5e-4.
  CHECK(std::abs(sum / n - 0.5) < 4e-3);
}

TEST_CASE("normal draws have unit variance") {
  CounterRng rng(2);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("below is unbiased and in range") {
  CounterRng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 400);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  CounterRng r1(9), r2(9);
  r1.shuffle(std::span(a));
  r2.shuffle(std::span(b));
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(sorted == expected);
  CHECK(a != expected);
}

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(avc::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(avc::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(avc::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derived seeds separate labels") {
  std::set<std::uint64_t> seen;
  for (const char* label : {"a", "b", "init", "order"}) seen.insert(avc::derive_seed(5, label));
  CHECK(seen.size() == 4);
  CHECK(avc::derive_seed(5, "a") == avc::derive_seed(5, "a"));
  CHECK(avc::derive_seed(5, 1, 2) != avc::derive_seed(5, 2, 1));
}

TEST_CASE("error codes carry through require") {
  try {
    avc::require(false, avc::ErrorCode::kEmptyCorpus, "nothing here");
    FAIL("expected throw");
  } catch (const avc::Error& e) {
    CHECK(e.code() == avc::ErrorCode::kEmptyCorpus);
    CHECK(std::string(e.what()) == "nothing here");
  }
  CHECK(avc::error_code_name(avc::ErrorCode::kNotACheckpoint).size() > 0);
}
