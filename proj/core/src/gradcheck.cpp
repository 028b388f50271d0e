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

#include "avcascade/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "avcascade/error.hpp"
#include "avcascade/rng.hpp"

namespace avc::graph {

namespace {

double evaluate(const ParamSet& params, const Fragment& fragment) {
  Graph g;
  return g.value(fragment(g, params)).item();
}

ParamSet jittered(const ParamSet& params, const GradCheckOptions& options) {
  ParamSet out = params;
  if (options.perturbation <= 0.0) return out;
  CounterRng rng(options.seed, 0x9c);
  for (const auto& name : out.names()) {
    if (out.frozen(name)) continue;
    for (double& v : out.mutable_value(name).values()) v += options.perturbation * rng.normal();
  }
  return out;
}

}  // namespace

double relative_error(double analytic, double numeric, double abs_floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const ParamSet& params, const Fragment& fragment, double tolerance,
                           const GradCheckOptions& options) {
  const ParamSet probe = jittered(params, options);
  Graph g;
  const Var out = fragment(g, probe);
  const Gradients analytic = g.backward(out);
  return compare_gradients(probe, fragment, analytic, tolerance, options);
}

GradCheckReport compare_gradients(const ParamSet& params, const Fragment& fragment,
                                  const Gradients& analytic, double tolerance,
                                  const GradCheckOptions& options) {
  ParamSet probe = params;
  CounterRng rng(options.seed, 0x5e1ec7);
  GradCheckReport report;
  for (const auto& name : probe.names()) {
    if (probe.frozen(name)) continue;
    const std::size_t n = probe.value(name).size();
    auto it = analytic.find(name);

    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (options.max_probes_per_param > 0 && n > options.max_probes_per_param) {
      rng.shuffle(std::span<std::size_t>(indices));
      indices.resize(options.max_probes_per_param);
      std::sort(indices.begin(), indices.end());
    }

    for (std::size_t idx : indices) {
      double& slot = probe.mutable_value(name)[idx];
      const double saved = slot;
      slot = saved + options.epsilon;
      const double up = evaluate(probe, fragment);
      slot = saved - options.epsilon;
      const double down = evaluate(probe, fragment);
      slot = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = it == analytic.end() ? 0.0 : it->second[idx];
      const double err = relative_error(a, numeric, options.abs_floor);
      ++report.probes;
      if (report.probes == 1 || err > report.max_rel_err) {
        report.max_rel_err = err;
        report.worst_param = name;
        report.worst_index = idx;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.pass = report.max_rel_err < tolerance;
  return report;
}

}  // namespace avc::graph
