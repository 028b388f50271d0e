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

#include <string>
#include <string_view>
#include <vector>

namespace avc::cli {

/// One row of a transfer-curve CSV. Numeric fields keep their source text so
/// plots can echo the data unchanged.
struct CurveRow {
  double percent = 0.0;
  std::string direction;
  std::string model;
  double r1 = 0.0, r5 = 0.0, r10 = 0.0, med_rank = 0.0;
  std::vector<std::string> text;  // the seven raw fields
};

/// Throws kParse on a wrong header, a short row or a non-numeric value.
std::vector<CurveRow> parse_curve_csv(std::string_view csv);

/// Line chart of metric ("r1", "r5", "r10" or "med_rank") against percent,
/// one series per model and direction. The SVG carries the CSV's SHA-256.
std::string render_curve_svg(std::string_view csv, std::string_view metric);

}  // namespace avc::cli
