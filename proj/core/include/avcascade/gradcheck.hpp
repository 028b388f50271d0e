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

#include <cstdint>
#include <functional>
#include <string>

#include "avcascade/graph.hpp"

namespace avc::graph {

/// A differentiable computation to probe: records a scalar output on the
/// given graph using the given parameters.
using Fragment = std::function<Var(Graph&, const ParamSet&)>;

struct GradCheckOptions {
  double epsilon = 1e-4;
  /// Entries probed per parameter tensor; 0 probes every entry.
  std::size_t max_probes_per_param = 0;
  /// Std-dev of the Gaussian jitter applied to all parameters before probing.
  double perturbation = 0.0;
  /// Denominator floor in the relative error, so exact zeros compare sanely.
  double abs_floor = 1e-8;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t probes = 0;
  bool pass = true;
};

/// rel = |a - n| / max(|a|, |n|, abs_floor)
double relative_error(double analytic, double numeric, double abs_floor);

/// Compares the fragment's reverse-mode gradient against central finite
/// differences for every trainable parameter.
GradCheckReport grad_check(const ParamSet& params, const Fragment& fragment, double tolerance,
                           const GradCheckOptions& options = {});

/// Same comparison with caller-supplied analytic gradients, evaluated at
/// params exactly (no jitter).
GradCheckReport compare_gradients(const ParamSet& params, const Fragment& fragment,
                                  const Gradients& analytic, double tolerance,
                                  const GradCheckOptions& options = {});

}  // namespace avc::graph
