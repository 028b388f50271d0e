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

#include "avcascade/gradcheck.hpp"
#include "test_support.hpp"

using namespace avc;
using namespace avc::graph;
using avc::testing::random_tensor;

namespace {

ParamSet affine_params(std::uint64_t seed) {
  CounterRng rng(seed);
  ParamSet p;
  p.add("W", random_tensor(Shape{3, 5}, rng));
  p.add("b", random_tensor(Shape{3}, rng));
  return p;
}

Var affine_fragment(Graph& g, const ParamSet& p) {
  CounterRng rng(77);
  const Var x = g.constant(random_tensor(Shape{4, 5}, rng));
  return g.sum(g.logsumexp_rows(g.transpose(g.affine(x, g.param(p, "W"), g.param(p, "b")))));
}

}  // namespace

TEST_CASE("relative error uses the larger magnitude with a floor") {
  CHECK(relative_error(1.0, 1.0, 1e-8) == 0.0);
  CHECK(relative_error(2.0, 1.0, 1e-8) == doctest::Approx(0.5));
  CHECK(relative_error(0.0, 0.0, 1e-8) == 0.0);
  CHECK(relative_error(1e-12, 0.0, 1e-8) == doctest::Approx(1e-4));
}

TEST_CASE("affine layer passes at 1e-6") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = grad_check(affine_params(seed), affine_fragment, 1e-6);
    CAPTURE(r.max_rel_err);
    CHECK(r.pass);
    CHECK(r.probes == 18);
  }
}

TEST_CASE("rectifier probed away from its kink passes at 1e-5") {
  CounterRng rng(3);
  Tensor x = random_tensor(Shape{6, 4}, rng);
  for (double& v : x.values())
    if (std::abs(v) < 1e-3) v = v < 0 ? -1e-3 - 1e-2 : 1e-3 + 1e-2;
  ParamSet p;
  p.add("x", x);
  const Fragment f = [](Graph& g, const ParamSet& q) {
    const Var r = g.relu(g.param(q, "x"));
    return g.sum(g.logsumexp_rows(r));
  };
  const auto r = grad_check(p, f, 1e-5);
  CAPTURE(r.max_rel_err);
  CHECK(r.pass);
}

TEST_CASE("a gradient corrupted by one percent is detected") {
  const ParamSet p = affine_params(1);
  Graph g;
  Gradients analytic = g.backward(affine_fragment(g, p));
  const auto clean = compare_gradients(p, affine_fragment, analytic, 1e-6);
  CHECK(clean.pass);
  for (auto& [name, t] : analytic)
    for (double& v : t.values()) v *= 1.01;
  const auto bad = compare_gradients(p, affine_fragment, analytic, 1e-4);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_rel_err == doctest::Approx(0.01 / 1.01).epsilon(1e-3));
  CHECK_FALSE(bad.worst_param.empty());
}

TEST_CASE("probe limits and jitter are honoured") {
  GradCheckOptions opt;
  opt.max_probes_per_param = 2;
  opt.perturbation = 0.1;
  opt.seed = 4;
  const auto r = grad_check(affine_params(2), affine_fragment, 1e-6, opt);
  CHECK(r.probes == 4);
  CHECK(r.pass);
}

TEST_CASE("frozen parameters are not probed") {
  ParamSet p = affine_params(3);
  p.set_frozen("W", true);
  const auto r = grad_check(p, affine_fragment, 1e-6);
  CHECK(r.probes == 3);
}
