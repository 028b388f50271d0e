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

#include "avcascade/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "avcascade/error.hpp"

namespace avc::graph {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;
using CStrided = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

CMapMat as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return CMapMat(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MapMat as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return MapMat(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void check_rank(const Tensor& t, std::size_t rank, const char* op) {
  require(t.rank() == rank, ErrorCode::kShapeMismatch,
          std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
              shape_string(t.shape()));
}

}  // namespace

// ---- ParamSet ---------------------------------------------------------------

void ParamSet::add(std::string name, Tensor value, bool frozen) {
  require(!name.empty(), ErrorCode::kInvalidArgument, "parameter name must be non-empty");
  const auto [it, inserted] = entries_.try_emplace(std::move(name), ParamEntry{std::move(value), frozen});
  require(inserted, ErrorCode::kInvalidArgument, "duplicate parameter '" + it->first + "'");
}

bool ParamSet::contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }

const ParamEntry& ParamSet::entry(std::string_view name) const {
  auto it = entries_.find(name);
  require(it != entries_.end(), ErrorCode::kInvalidArgument,
          "unknown parameter '" + std::string(name) + "'");
  return it->second;
}

ParamEntry& ParamSet::entry(std::string_view name) {
  auto it = entries_.find(name);
  require(it != entries_.end(), ErrorCode::kInvalidArgument,
          "unknown parameter '" + std::string(name) + "'");
  return it->second;
}

const Tensor& ParamSet::value(std::string_view name) const { return entry(name).value; }
Tensor& ParamSet::mutable_value(std::string_view name) { return entry(name).value; }
bool ParamSet::frozen(std::string_view name) const { return entry(name).frozen; }
void ParamSet::set_frozen(std::string_view name, bool frozen) { entry(name).frozen = frozen; }

std::size_t ParamSet::set_frozen_prefix(std::string_view prefix, bool frozen) {
  std::size_t n = 0;
  for (auto& [name, e] : entries_) {
    if (name.starts_with(prefix)) {
      e.frozen = frozen;
      ++n;
    }
  }
  return n;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

void accumulate(Gradients& into, const Gradients& from) {
  for (const auto& [name, g] : from) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, g);
      continue;
    }
    require(it->second.shape() == g.shape(), ErrorCode::kShapeMismatch,
            "gradient shape mismatch for '" + name + "'");
    auto dst = it->second.values();
    auto src = g.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

// ---- Graph plumbing ------------------------------------------------------------

const Tensor& Graph::val(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.owned;
}

Tensor& Graph::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(val(id).shape(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

const Graph::Node& Graph::node(Var v) const {
  require(v.id < nodes_.size(), ErrorCode::kContractViolation, "variable not recorded in this graph");
  return nodes_[v.id];
}

const Tensor& Graph::value(Var v) const {
  node(v);
  return val(v.id);
}

const Tensor& Graph::grad(Var v) const {
  const Node& n = node(v);
  require(n.has_grad, ErrorCode::kContractViolation, "no gradient recorded for this variable");
  return n.grad;
}

Var Graph::push(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
  require(value.all_finite(), ErrorCode::kNumerical, "non-finite value produced in forward pass");
  Node n;
  n.owned = std::move(value);
  n.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                             [this](std::size_t i) { return nodes_[i].needs_grad; });
  n.inputs = std::move(inputs);
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::constant(Tensor value) {
  require(value.all_finite(), ErrorCode::kNumerical, "non-finite input to the graph");
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::variable(Tensor value) {
  require(value.all_finite(), ErrorCode::kNumerical, "non-finite input to the graph");
  Node n;
  n.owned = std::move(value);
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::param(const ParamSet& params, const std::string& name) {
  Node n;
  n.external = &params.value(name);
  if (!params.frozen(name)) {
    n.needs_grad = true;
    n.param_name = name;
  }
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Gradients Graph::backward(Var output) {
  const Tensor& out = value(output);
  require(out.size() == 1, ErrorCode::kContractViolation,
          "backward() requires a scalar output, got shape " + shape_string(out.shape()));
  return backward(output, Tensor(out.shape(), 1.0));
}

Gradients Graph::backward(Var output, const Tensor& seed) {
  require(value(output).shape() == seed.shape(), ErrorCode::kShapeMismatch,
          "backward seed shape " + shape_string(seed.shape()) + " does not match output " +
              shape_string(value(output).shape()));
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  Gradients grads;
  if (!nodes_[output.id].needs_grad) return grads;
  nodes_[output.id].grad = seed;
  nodes_[output.id].has_grad = true;
  for (std::size_t id = output.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.needs_grad) continue;
    if (n.backward) n.backward(*this, id);
    if (!n.param_name.empty()) {
      Gradients one;
      one.emplace(n.param_name, n.grad);
      accumulate(grads, one);
    }
  }
  return grads;
}

// ---- Ops -----------------------------------------------------------------------

Var Graph::affine(Var x, Var weight, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& w = value(weight);
  const Tensor& b = value(bias);
  check_rank(w, 2, "affine weight");
  check_rank(b, 1, "affine bias");
  require(xv.rank() == 1 || xv.rank() == 2, ErrorCode::kShapeMismatch, "affine: x must be rank 1 or 2");
  const std::size_t in = w.dim(1), out = w.dim(0);
  const std::size_t n = xv.rank() == 1 ? 1 : xv.dim(0);
  require(xv.shape().back() == in && b.dim(0) == out, ErrorCode::kShapeMismatch,
          "affine: x " + shape_string(xv.shape()) + ", W " + shape_string(w.shape()) + ", b " +
              shape_string(b.shape()));

  Tensor y(xv.rank() == 1 ? Shape{out} : Shape{n, out});
  auto ym = as_matrix(y, n, out);
  ym.noalias() = as_matrix(xv, n, in) * as_matrix(w, out, in).transpose();
  ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data(), static_cast<Eigen::Index>(out));

  return push(std::move(y), {x.id, weight.id, bias.id}, [n, in, out](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0], iw = g.nodes_[self].inputs[1],
               ib = g.nodes_[self].inputs[2];
    const auto dy = as_matrix(g.nodes_[self].grad, n, out);
    if (g.nodes_[ix].needs_grad)
      as_matrix(g.grad_ref(ix), n, in).noalias() += dy * as_matrix(g.val(iw), out, in);
    if (g.nodes_[iw].needs_grad)
      as_matrix(g.grad_ref(iw), out, in).noalias() += dy.transpose() * as_matrix(g.val(ix), n, in);
    if (g.nodes_[ib].needs_grad)
      as_matrix(g.grad_ref(ib), 1, out) += dy.colwise().sum();
  });
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_rank(av, 2, "matmul lhs");
  check_rank(bv, 2, "matmul rhs");
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  require(bv.dim(0) == k, ErrorCode::kShapeMismatch,
          "matmul: " + shape_string(av.shape()) + " x " + shape_string(bv.shape()));
  Tensor y(Shape{m, n});
  as_matrix(y, m, n).noalias() = as_matrix(av, m, k) * as_matrix(bv, k, n);
  return push(std::move(y), {a.id, b.id}, [m, k, n](Graph& g, std::size_t self) {
    const auto ia = g.nodes_[self].inputs[0], ib = g.nodes_[self].inputs[1];
    const auto dy = as_matrix(g.nodes_[self].grad, m, n);
    if (g.nodes_[ia].needs_grad)
      as_matrix(g.grad_ref(ia), m, k).noalias() += dy * as_matrix(g.val(ib), k, n).transpose();
    if (g.nodes_[ib].needs_grad)
      as_matrix(g.grad_ref(ib), k, n).noalias() += as_matrix(g.val(ia), m, k).transpose() * dy;
  });
}

Var Graph::matmul_nt(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_rank(av, 2, "matmul_nt lhs");
  check_rank(bv, 2, "matmul_nt rhs");
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(0);
  require(bv.dim(1) == k, ErrorCode::kShapeMismatch,
          "matmul_nt: " + shape_string(av.shape()) + " x " + shape_string(bv.shape()) + "^T");
  Tensor y(Shape{m, n});
  as_matrix(y, m, n).noalias() = as_matrix(av, m, k) * as_matrix(bv, n, k).transpose();
  return push(std::move(y), {a.id, b.id}, [m, k, n](Graph& g, std::size_t self) {
    const auto ia = g.nodes_[self].inputs[0], ib = g.nodes_[self].inputs[1];
    const auto dy = as_matrix(g.nodes_[self].grad, m, n);
    if (g.nodes_[ia].needs_grad)
      as_matrix(g.grad_ref(ia), m, k).noalias() += dy * as_matrix(g.val(ib), n, k);
    if (g.nodes_[ib].needs_grad)
      as_matrix(g.grad_ref(ib), n, k).noalias() += dy.transpose() * as_matrix(g.val(ia), m, k);
  });
}

Var Graph::conv1d(Var x, Var weight, Var bias, std::size_t stride) {
  const Tensor& xv = value(x);
  const Tensor& w = value(weight);
  const Tensor& b = value(bias);
  check_rank(xv, 2, "conv1d input");
  check_rank(w, 3, "conv1d weight");
  check_rank(b, 1, "conv1d bias");
  require(stride >= 1, ErrorCode::kInvalidArgument, "conv1d: stride must be positive");
  const std::size_t len = xv.dim(0), cin = xv.dim(1);
  const std::size_t cout = w.dim(0), kernel = w.dim(1);
  require(w.dim(2) == cin && b.dim(0) == cout, ErrorCode::kShapeMismatch,
          "conv1d: x " + shape_string(xv.shape()) + ", W " + shape_string(w.shape()) + ", b " +
              shape_string(b.shape()));
  require(len >= kernel, ErrorCode::kShapeMismatch,
          "conv1d: input length " + std::to_string(len) + " shorter than kernel " +
              std::to_string(kernel));
  const std::size_t lout = (len - kernel) / stride + 1;
  const std::size_t patch = kernel * cin;

  // Time-major input makes each receptive field a contiguous run of
  // kernel*cin values, so the im2col matrix is a strided view of x.
  const auto cols = [&](const Tensor& t) {
    return CStrided(t.data(), static_cast<Eigen::Index>(lout), static_cast<Eigen::Index>(patch),
                    Eigen::OuterStride<>(static_cast<Eigen::Index>(stride * cin)));
  };

  Tensor y(Shape{lout, cout});
  auto ym = as_matrix(y, lout, cout);
  ym.noalias() = cols(xv) * as_matrix(w, cout, patch).transpose();
  ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data(), static_cast<Eigen::Index>(cout));

  return push(std::move(y), {x.id, weight.id, bias.id},
              [lout, cout, patch, stride, cin](Graph& g, std::size_t self) {
                const auto ix = g.nodes_[self].inputs[0], iw = g.nodes_[self].inputs[1],
                           ib = g.nodes_[self].inputs[2];
                const auto dy = as_matrix(g.nodes_[self].grad, lout, cout);
                const Tensor& xv = g.val(ix);
                if (g.nodes_[iw].needs_grad) {
                  CStrided colm(xv.data(), static_cast<Eigen::Index>(lout),
                                static_cast<Eigen::Index>(patch),
                                Eigen::OuterStride<>(static_cast<Eigen::Index>(stride * cin)));
                  as_matrix(g.grad_ref(iw), cout, patch).noalias() += dy.transpose() * colm;
                }
                if (g.nodes_[ib].needs_grad) as_matrix(g.grad_ref(ib), 1, cout) += dy.colwise().sum();
                if (g.nodes_[ix].needs_grad) {
                  RowMat dcols = dy * as_matrix(g.val(iw), cout, patch);
                  Tensor& dx = g.grad_ref(ix);
                  for (std::size_t t = 0; t < lout; ++t) {
                    double* dst = dx.data() + t * stride * cin;
                    const double* src = dcols.data() + t * patch;
                    for (std::size_t j = 0; j < patch; ++j) dst[j] += src[j];
                  }
                }
              });
}

Var Graph::relu(Var x) {
  Tensor y = value(x);
  for (double& v : y.values()) {
    relu_margin_ = std::min(relu_margin_, std::abs(v));
    v = v > 0.0 ? v : 0.0;
  }
  return push(std::move(y), {x.id}, [](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& xv = g.val(ix);
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    for (std::size_t i = 0; i < dx.size(); ++i)
      if (xv[i] > 0.0) dx[i] += dy[i];
  });
}

Var Graph::mean_time(Var x) {
  const Tensor& xv = value(x);
  check_rank(xv, 2, "mean_time");
  const std::size_t len = xv.dim(0), ch = xv.dim(1);
  require(len >= 1, ErrorCode::kShapeMismatch, "mean_time: empty sequence");
  Tensor y(Shape{ch});
  Eigen::Map<Eigen::RowVectorXd>(y.data(), static_cast<Eigen::Index>(ch)) =
      as_matrix(xv, len, ch).colwise().mean();
  return push(std::move(y), {x.id}, [len, ch](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    const double inv = 1.0 / static_cast<double>(len);
    for (std::size_t t = 0; t < len; ++t)
      for (std::size_t c = 0; c < ch; ++c) dx.at(t, c) += dy[c] * inv;
  });
}

Var Graph::max_time(Var x) {
  const Tensor& xv = value(x);
  check_rank(xv, 2, "max_time");
  const std::size_t len = xv.dim(0), ch = xv.dim(1);
  require(len >= 1, ErrorCode::kShapeMismatch, "max_time: empty sequence");
  Tensor y(Shape{ch});
  std::vector<std::size_t> argmax(ch, 0);
  for (std::size_t c = 0; c < ch; ++c) y[c] = xv.at(0, c);
  for (std::size_t t = 1; t < len; ++t)
    for (std::size_t c = 0; c < ch; ++c)
      if (xv.at(t, c) > y[c]) {
        y[c] = xv.at(t, c);
        argmax[c] = t;
      }
  return push(std::move(y), {x.id}, [argmax = std::move(argmax), ch](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    for (std::size_t c = 0; c < ch; ++c) dx.at(argmax[c], c) += dy[c];
  });
}

Var Graph::add(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.shape() == bv.shape(), ErrorCode::kShapeMismatch,
          "add: " + shape_string(av.shape()) + " vs " + shape_string(bv.shape()));
  Tensor y = av;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return push(std::move(y), {a.id, b.id}, [](Graph& g, std::size_t self) {
    const Tensor& dy = g.nodes_[self].grad;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto in = g.nodes_[self].inputs[k];
      if (!g.nodes_[in].needs_grad) continue;
      Tensor& d = g.grad_ref(in);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
    }
  });
}

Var Graph::sub(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.shape() == bv.shape(), ErrorCode::kShapeMismatch,
          "sub: " + shape_string(av.shape()) + " vs " + shape_string(bv.shape()));
  Tensor y = av;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  return push(std::move(y), {a.id, b.id}, [](Graph& g, std::size_t self) {
    const Tensor& dy = g.nodes_[self].grad;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto in = g.nodes_[self].inputs[k];
      if (!g.nodes_[in].needs_grad) continue;
      const double sign = k == 0 ? 1.0 : -1.0;
      Tensor& d = g.grad_ref(in);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += sign * dy[i];
    }
  });
}

Var Graph::scale(Var x, double factor) {
  Tensor y = value(x);
  for (double& v : y.values()) v *= factor;
  return push(std::move(y), {x.id}, [factor](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += factor * dy[i];
  });
}

Var Graph::stack_rows(std::span<const Var> rows) {
  require(!rows.empty(), ErrorCode::kShapeMismatch, "stack_rows: no rows");
  const std::size_t d = value(rows[0]).size();
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  Tensor y(Shape{rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Tensor& rv = value(rows[r]);
    require(rv.rank() == 1 && rv.size() == d, ErrorCode::kShapeMismatch,
            "stack_rows: row " + std::to_string(r) + " has shape " + shape_string(rv.shape()));
    std::copy(rv.data(), rv.data() + d, y.data() + r * d);
    ids.push_back(rows[r].id);
  }
  return push(std::move(y), std::move(ids), [d](Graph& g, std::size_t self) {
    const Tensor& dy = g.nodes_[self].grad;
    const auto& ins = g.nodes_[self].inputs;
    for (std::size_t r = 0; r < ins.size(); ++r) {
      if (!g.nodes_[ins[r]].needs_grad) continue;
      Tensor& dr = g.grad_ref(ins[r]);
      for (std::size_t j = 0; j < d; ++j) dr[j] += dy[r * d + j];
    }
  });
}

Var Graph::transpose(Var x) {
  const Tensor& xv = value(x);
  check_rank(xv, 2, "transpose");
  const std::size_t m = xv.dim(0), n = xv.dim(1);
  Tensor y(Shape{n, m});
  as_matrix(y, n, m) = as_matrix(xv, m, n).transpose();
  return push(std::move(y), {x.id}, [m, n](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    as_matrix(g.grad_ref(ix), m, n) += as_matrix(g.nodes_[self].grad, n, m).transpose();
  });
}

Var Graph::diag(Var x) {
  const Tensor& xv = value(x);
  check_rank(xv, 2, "diag");
  require(xv.dim(0) == xv.dim(1), ErrorCode::kShapeMismatch,
          "diag: matrix must be square, got " + shape_string(xv.shape()));
  const std::size_t n = xv.dim(0);
  Tensor y(Shape{n});
  for (std::size_t i = 0; i < n; ++i) y[i] = xv.at(i, i);
  return push(std::move(y), {x.id}, [n](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    for (std::size_t i = 0; i < n; ++i) dx.at(i, i) += dy[i];
  });
}

Var Graph::logsumexp_rows(Var x) {
  const Tensor& xv = value(x);
  check_rank(xv, 2, "logsumexp_rows");
  const std::size_t m = xv.dim(0), n = xv.dim(1);
  require(n >= 1, ErrorCode::kShapeMismatch, "logsumexp_rows: empty rows");
  Tensor y(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    double mx = xv.at(i, 0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, xv.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp(xv.at(i, j) - mx);
    y[i] = mx + std::log(s);
  }
  return push(std::move(y), {x.id}, [m, n](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const Tensor& xv = g.val(ix);
    const Tensor& yv = g.val(self);
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.grad_ref(ix);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) dx.at(i, j) += dy[i] * std::exp(xv.at(i, j) - yv[i]);
  });
}

Var Graph::sum(Var x) {
  const Tensor& xv = value(x);
  double s = 0.0;
  for (double v : xv.values()) s += v;
  return push(Tensor::scalar(s), {x.id}, [](Graph& g, std::size_t self) {
    const auto ix = g.nodes_[self].inputs[0];
    const double dy = g.nodes_[self].grad[0];
    Tensor& dx = g.grad_ref(ix);
    for (double& v : dx.values()) v += dy;
  });
}

Var Graph::scalar_with_gradient(Var x, double value_, Tensor d_value_dx) {
  require(value(x).shape() == d_value_dx.shape(), ErrorCode::kShapeMismatch,
          "scalar_with_gradient: gradient shape " + shape_string(d_value_dx.shape()) +
              " does not match input " + shape_string(value(x).shape()));
  return push(Tensor::scalar(value_), {x.id},
              [d = std::move(d_value_dx)](Graph& g, std::size_t self) {
                const auto ix = g.nodes_[self].inputs[0];
                const double dy = g.nodes_[self].grad[0];
                Tensor& dx = g.grad_ref(ix);
                for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy * d[i];
              });
}

}  // namespace avc::graph
