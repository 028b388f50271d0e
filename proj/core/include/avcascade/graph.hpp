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

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "avcascade/tensor.hpp"

namespace avc::graph {

struct ParamEntry {
  Tensor value;
  bool frozen = false;

  friend bool operator==(const ParamEntry&, const ParamEntry&) = default;
};

/// Named parameter tensors with per-name frozen flags. Iteration order is
/// lexicographic by name, which fixes serialization and reduction order.
class ParamSet {
 public:
  void add(std::string name, Tensor value, bool frozen = false);

  bool contains(std::string_view name) const;
  const Tensor& value(std::string_view name) const;
  Tensor& mutable_value(std::string_view name);
  bool frozen(std::string_view name) const;
  void set_frozen(std::string_view name, bool frozen);
  /// Sets the flag on every parameter whose name starts with prefix.
  std::size_t set_frozen_prefix(std::string_view prefix, bool frozen);

  std::vector<std::string> names() const;
  const std::map<std::string, ParamEntry, std::less<>>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t scalar_count() const noexcept;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  const ParamEntry& entry(std::string_view name) const;
  ParamEntry& entry(std::string_view name);

  std::map<std::string, ParamEntry, std::less<>> entries_;
};

/// Gradient per trainable parameter name.
using Gradients = std::map<std::string, Tensor, std::less<>>;

/// into[name] += from[name]; missing names are inserted.
void accumulate(Gradients& into, const Gradients& from);

/// Handle to a node recorded in a Graph.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const noexcept { return id != kInvalid; }
};

/// Single-use reverse-mode tape over a closed set of ops.
///
/// Tensors are row-major. Sequences are time-major: a [L, C] tensor holds L
/// frames of C channels. Parameter nodes reference the ParamSet they came from
/// without copying, so the ParamSet must outlive the graph and must not be
/// modified while the graph is in use.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  /// Input that receives no gradient.
  Var constant(Tensor value);
  /// Input whose gradient is available through grad() after backward().
  Var variable(Tensor value);
  /// Parameter leaf. Frozen parameters behave like constants.
  Var param(const ParamSet& params, const std::string& name);

  /// y = x·Wᵀ + b with x [n, in] or [in], W [out, in], b [out].
  Var affine(Var x, Var weight, Var bias);
  /// [m, k]·[k, n]
  Var matmul(Var a, Var b);
  /// [m, k]·[n, k]ᵀ
  Var matmul_nt(Var a, Var b);
  /// Unpadded strided convolution over time. x [L, Cin], W [Cout, K, Cin],
  /// b [Cout] -> [floor((L - K) / stride) + 1, Cout].
  Var conv1d(Var x, Var weight, Var bias, std::size_t stride);
  /// max(x, 0); subgradient 0 at 0.
  Var relu(Var x);
  /// [L, C] -> [C]
  Var mean_time(Var x);
  /// [L, C] -> [C]; ties route the gradient to the earliest frame.
  Var max_time(Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var x, double factor);
  /// Rank-1 tensors of equal length -> [n, d].
  Var stack_rows(std::span<const Var> rows);
  Var transpose(Var x);
  /// [n, n] -> [n]
  Var diag(Var x);
  /// [m, n] -> [m], stabilized by the row max.
  Var logsumexp_rows(Var x);
  /// Sum of all entries -> scalar.
  Var sum(Var x);
  /// Scalar whose value and gradient with respect to x were computed
  /// analytically elsewhere (the contrastive loss uses this).
  Var scalar_with_gradient(Var x, double value, Tensor d_value_dx);

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() output with respect to v.
  const Tensor& grad(Var v) const;

  /// Gradients of a scalar output with respect to every trainable parameter
  /// that was used. Throws kContractViolation for non-scalar outputs.
  Gradients backward(Var output);
  /// Vector-Jacobian product with an explicit output cotangent.
  Gradients backward(Var output, const Tensor& seed);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Smallest |input| seen by any relu so far; finite-difference probes
  /// closer than this to a kink are unreliable.
  double relu_margin() const noexcept { return relu_margin_; }

 private:
  using BackwardFn = std::function<void(Graph&, std::size_t)>;

  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    bool needs_grad = false;
    bool has_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    std::string param_name;
  };

  const Tensor& val(std::size_t id) const;
  Tensor& grad_ref(std::size_t id);
  const Node& node(Var v) const;
  Var push(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

  std::vector<Node> nodes_;
  double relu_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace avc::graph
