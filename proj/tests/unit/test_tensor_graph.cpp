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

#include <cmath>
#include <functional>
#include <vector>

#include "avcascade/error.hpp"
#include "avcascade/gradcheck.hpp"
#include "avcascade/graph.hpp"
#include "test_support.hpp"

using namespace avc;
using namespace avc::graph;
using avc::testing::random_tensor;

namespace {

/// Contracts any rank-0/1/2 node against a fixed random readout so every
/// output entry reaches the scalar with a distinct weight.
Var readout(Graph& g, Var y, std::uint64_t seed) {
  const Tensor& v = g.value(y);
  if (v.rank() == 0) return y;
  CounterRng rng(seed, 99);
  const std::size_t n = v.shape().back();
  Var rows = v.rank() == 1 ? g.stack_rows(std::vector<Var>{y}) : y;
  return g.sum(g.matmul(rows, g.constant(random_tensor(Shape{n, 1}, rng))));
}

void check_op(const char* label, ParamSet params, const Fragment& op, double tol = 1e-6) {
  CAPTURE(label);
  const Fragment f = [&](Graph& g, const ParamSet& p) { return readout(g, op(g, p), 5); };
  const GradCheckReport r = grad_check(params, f, tol);
  CAPTURE(r.worst_param);
  CAPTURE(r.max_rel_err);
  CHECK(r.probes > 0);
  CHECK(r.pass);
}

}  // namespace

TEST_CASE("identity gradient is one") {
  ParamSet p;
  p.add("x", Tensor::scalar(3.0));
  Graph g;
  const Var x = g.param(p, "x");
  const Gradients grads = g.backward(x);
  REQUIRE(grads.contains("x"));
  CHECK(grads.at("x").item() == 1.0);
}

TEST_CASE("gradient of sum(W v) has every row equal to v") {
  CounterRng rng(1);
  ParamSet p;
  p.add("W", random_tensor(Shape{4, 3}, rng));
  const Tensor v = Tensor::matrix(3, 1, {0.5, -2.0, 3.0});
  Graph g;
  const Var out = g.sum(g.matmul(g.param(p, "W"), g.constant(v)));
  const Tensor dW = g.backward(out).at("W");
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(dW.at(r, c) == v[c]);
}

TEST_CASE("backward on a non-scalar output is a contract violation") {
  ParamSet p;
  p.add("x", Tensor::vector({1.0, 2.0}));
  Graph g;
  const Var x = g.param(p, "x");
  try {
    g.backward(x);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kContractViolation);
  }
}

TEST_CASE("frozen parameters receive no gradient entry") {
  ParamSet p;
  p.add("a", Tensor::vector({1.0, 2.0}));
  p.add("b", Tensor::vector({3.0, 4.0}), true);
  Graph g;
  const Var out = g.sum(g.add(g.param(p, "a"), g.param(p, "b")));
  const Gradients grads = g.backward(out);
  CHECK(grads.contains("a"));
  CHECK_FALSE(grads.contains("b"));
}

TEST_CASE("shared parameters accumulate gradients from every use") {
  ParamSet p;
  p.add("x", Tensor::vector({1.0, -1.0}));
  Graph g;
  const Var out = g.sum(g.add(g.param(p, "x"), g.scale(g.param(p, "x"), 3.0)));
  const Tensor dx = g.backward(out).at("x");
  CHECK(dx[0] == 4.0);
  CHECK(dx[1] == 4.0);
}

TEST_CASE("variables expose input gradients") {
  Graph g;
  const Var x = g.variable(Tensor::vector({1.0, 2.0, 3.0}));
  const Var out = g.sum(g.scale(x, 2.0));
  g.backward(out);
  for (double v : g.grad(x).values()) CHECK(v == 2.0);
}

TEST_CASE("non-finite values are rejected") {
  Graph g;
  try {
    g.constant(Tensor::vector({1.0, std::nan("")}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumerical);
  }
}

TEST_CASE("forward values of the primitive ops") {
  Graph g;
  const Var a = g.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  const Var b = g.constant(Tensor::matrix(2, 2, {5, 6, 7, 8}));
  CHECK(g.value(g.matmul(a, b)) == Tensor::matrix(2, 2, {19, 22, 43, 50}));
  CHECK(g.value(g.matmul_nt(a, b)) == Tensor::matrix(2, 2, {17, 23, 39, 53}));
  CHECK(g.value(g.transpose(a)) == Tensor::matrix(2, 2, {1, 3, 2, 4}));
  CHECK(g.value(g.diag(a)) == Tensor::vector({1, 4}));
  CHECK(g.value(g.mean_time(a)) == Tensor::vector({2, 3}));
  CHECK(g.value(g.max_time(a)) == Tensor::vector({3, 4}));
  CHECK(g.value(g.sum(a)).item() == 10.0);
  CHECK(g.value(g.sub(b, a)) == Tensor::matrix(2, 2, {4, 4, 4, 4}));
  const Tensor lse = g.value(g.logsumexp_rows(a));
  CHECK(lse[0] == doctest::Approx(std::log(std::exp(1.0) + std::exp(2.0))).epsilon(1e-14));
  CHECK(lse[1] == doctest::Approx(std::log(std::exp(3.0) + std::exp(4.0))).epsilon(1e-14));
  const Tensor big = g.value(g.logsumexp_rows(g.constant(Tensor::matrix(1, 2, {1000.0, 1000.0}))));
  CHECK(big[0] == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("conv1d matches a direct loop") {
  CounterRng rng(4);
  const Tensor x = random_tensor(Shape{11, 3}, rng);
  const Tensor w = random_tensor(Shape{2, 5, 3}, rng);
  const Tensor b = random_tensor(Shape{2}, rng);
  Graph g;
  const Tensor y = g.value(g.conv1d(g.constant(x), g.constant(w), g.constant(b), 2));
  REQUIRE(y.shape() == Shape{4, 2});
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t o = 0; o < 2; ++o) {
      double acc = b[o];
      for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t c = 0; c < 3; ++c) acc += w[(o * 5 + k) * 3 + c] * x.at(2 * t + k, c);
      CHECK(y.at(t, o) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("every differentiable op passes a finite-difference check") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CAPTURE(seed);
    CounterRng rng(seed);
    {
      ParamSet p;
      p.add("x", random_tensor(Shape{3, 4}, rng));
      p.add("W", random_tensor(Shape{2, 4}, rng));
      p.add("b", random_tensor(Shape{2}, rng));
      check_op("affine", p, [](Graph& g, const ParamSet& q) {
        return g.affine(g.param(q, "x"), g.param(q, "W"), g.param(q, "b"));
      });
      check_op("affine rank 1", p, [](Graph& g, const ParamSet& q) {
        return g.affine(g.mean_time(g.param(q, "x")), g.param(q, "W"), g.param(q, "b"));
      });
    }
    {
      ParamSet p;
      p.add("a", random_tensor(Shape{3, 4}, rng));
      p.add("b", random_tensor(Shape{4, 2}, rng));
      p.add("c", random_tensor(Shape{5, 4}, rng));
      check_op("matmul", p, [](Graph& g, const ParamSet& q) { return g.matmul(g.param(q, "a"), g.param(q, "b")); });
      check_op("matmul_nt", p,
               [](Graph& g, const ParamSet& q) { return g.matmul_nt(g.param(q, "a"), g.param(q, "c")); });
      check_op("transpose", p, [](Graph& g, const ParamSet& q) { return g.transpose(g.param(q, "a")); });
    }
    {
      ParamSet p;
      p.add("x", random_tensor(Shape{13, 3}, rng));
      p.add("W", random_tensor(Shape{4, 5, 3}, rng));
      p.add("b", random_tensor(Shape{4}, rng));
      check_op("conv1d", p, [](Graph& g, const ParamSet& q) {
        return g.conv1d(g.param(q, "x"), g.param(q, "W"), g.param(q, "b"), 2);
      });
      check_op("conv1d stride 1", p, [](Graph& g, const ParamSet& q) {
        return g.conv1d(g.param(q, "x"), g.param(q, "W"), g.param(q, "b"), 1);
      });
    }
    {
      // Keep every pre-activation at least 0.1 away from the kink.
      Tensor x = random_tensor(Shape{4, 5}, rng);
      for (double& v : x.values()) v = v >= 0 ? v + 0.1 : v - 0.1;
      ParamSet p;
      p.add("x", x);
      check_op("relu", p, [](Graph& g, const ParamSet& q) { return g.relu(g.param(q, "x")); }, 1e-5);
    }
    {
      ParamSet p;
      p.add("x", random_tensor(Shape{6, 3}, rng));
      p.add("y", random_tensor(Shape{6, 3}, rng));
      p.add("sq", random_tensor(Shape{3, 3}, rng));
      p.add("r", random_tensor(Shape{3}, rng));
      check_op("mean_time", p, [](Graph& g, const ParamSet& q) { return g.mean_time(g.param(q, "x")); });
      check_op("max_time", p, [](Graph& g, const ParamSet& q) { return g.max_time(g.param(q, "x")); });
      check_op("add", p, [](Graph& g, const ParamSet& q) { return g.add(g.param(q, "x"), g.param(q, "y")); });
      check_op("sub", p, [](Graph& g, const ParamSet& q) { return g.sub(g.param(q, "x"), g.param(q, "y")); });
      check_op("scale", p, [](Graph& g, const ParamSet& q) { return g.scale(g.param(q, "x"), -1.7); });
      check_op("diag", p, [](Graph& g, const ParamSet& q) { return g.diag(g.param(q, "sq")); });
      check_op("logsumexp_rows", p,
               [](Graph& g, const ParamSet& q) { return g.logsumexp_rows(g.param(q, "x")); });
      check_op("sum", p, [](Graph& g, const ParamSet& q) { return g.sum(g.param(q, "x")); });
      check_op("stack_rows", p, [](Graph& g, const ParamSet& q) {
        const std::vector<Var> rows = {g.param(q, "r"), g.max_time(g.param(q, "x")), g.param(q, "r")};
        return g.stack_rows(rows);
      });
    }
  }
}

TEST_CASE("random three-layer network passes a finite-difference check") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(seed, 3);
    ParamSet p;
    p.add("W1", random_tensor(Shape{8, 6}, rng, 0.5));
    p.add("b1", random_tensor(Shape{8}, rng, 0.5));
    p.add("W2", random_tensor(Shape{8, 8}, rng, 0.5));
    p.add("b2", random_tensor(Shape{8}, rng, 0.5));
    p.add("W3", random_tensor(Shape{1, 8}, rng, 0.5));
    p.add("b3", random_tensor(Shape{1}, rng, 0.5));
    const Tensor x = random_tensor(Shape{5, 6}, rng);
    const Fragment net = [&](Graph& g, const ParamSet& q) {
      Var h = g.relu(g.affine(g.constant(x), g.param(q, "W1"), g.param(q, "b1")));
      h = g.relu(g.affine(h, g.param(q, "W2"), g.param(q, "b2")));
      return g.sum(g.affine(h, g.param(q, "W3"), g.param(q, "b3")));
    };
    Graph probe;
    net(probe, p);
    if (probe.relu_margin() < 1e-3) continue;  // too close to a kink for finite differences
    const auto r = grad_check(p, net, 1e-4);
    CAPTURE(r.max_rel_err);
    CHECK(r.pass);
  }
}

TEST_CASE("scalar_with_gradient injects an external gradient") {
  Graph g;
  const Var x = g.variable(Tensor::vector({1.0, 2.0}));
  const Var y = g.scalar_with_gradient(x, 7.0, Tensor::vector({0.25, -4.0}));
  CHECK(g.value(y).item() == 7.0);
  g.backward(y);
  CHECK(g.grad(x) == Tensor::vector({0.25, -4.0}));
}

TEST_CASE("param sets track frozen flags by prefix") {
  ParamSet p;
  p.add("audio.w", Tensor::scalar(1));
  p.add("visual.a", Tensor::scalar(2));
  p.add("visual.b", Tensor::scalar(3));
  CHECK(p.set_frozen_prefix("visual.", true) == 2);
  CHECK(p.frozen("visual.a"));
  CHECK_FALSE(p.frozen("audio.w"));
  CHECK(p.names() == std::vector<std::string>{"audio.w", "visual.a", "visual.b"});
  CHECK(p.scalar_count() == 3);
  CHECK_THROWS_AS(p.add("audio.w", Tensor::scalar(0)), Error);
}

TEST_CASE("forward pass is deterministic") {
  CounterRng rng(8);
  ParamSet p;
  p.add("W", random_tensor(Shape{3, 4, 2}, rng));
  p.add("b", random_tensor(Shape{3}, rng));
  const Tensor x = random_tensor(Shape{20, 2}, rng);
  const auto run = [&] {
    Graph g;
    return g.value(g.mean_time(g.relu(g.conv1d(g.constant(x), g.param(p, "W"), g.param(p, "b"), 2))));
  };
  CHECK(run() == run());
}
