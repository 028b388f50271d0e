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


#include "curve_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "avcascade/error.hpp"
#include "run_manifest.hpp"

namespace avc::cli {

namespace {

constexpr std::string_view kHeader = "percent,direction,model,r1,r5,r10,med_rank";

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

double number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v), ErrorCode::kParse,
          "curve csv line " + std::to_string(line) + ": '" + s + "' is not a number");
  return v;
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::round(v * 100.0) / 100.0);
  return std::string(buf, res.ptr);
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<CurveRow> parse_curve_csv(std::string_view csv) {
  std::vector<CurveRow> rows;
  std::size_t line_no = 0, pos = 0;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      require(line == kHeader, ErrorCode::kParse, "curve csv: expected header '" + std::string(kHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    auto f = split_fields(line);
    require(f.size() == 7, ErrorCode::kParse, "curve csv line " + std::to_string(line_no) + ": expected 7 fields");
    CurveRow r;
    r.percent = number(f[0], line_no);
    r.direction = f[1];
    r.model = f[2];
    r.r1 = number(f[3], line_no);
    r.r5 = number(f[4], line_no);
    r.r10 = number(f[5], line_no);
    r.med_rank = number(f[6], line_no);
    r.text = std::move(f);
    rows.push_back(std::move(r));
  }
  require(line_no >= 1, ErrorCode::kParse, "curve csv is empty");
  require(!rows.empty(), ErrorCode::kParse, "curve csv has no data rows");
  return rows;
}

std::string render_curve_svg(std::string_view csv, std::string_view metric) {
  static const std::map<std::string_view, std::size_t, std::less<>> kColumn = {
      {"r1", 3}, {"r5", 4}, {"r10", 5}, {"med_rank", 6}};
  const auto col = kColumn.find(metric);
  require(col != kColumn.end(), ErrorCode::kInvalidArgument,
          "unknown metric '" + std::string(metric) + "' (r1, r5, r10, med_rank)");
  const auto rows = parse_curve_csv(csv);
  auto value = [&](const CurveRow& r) { return number(r.text[col->second], 0); };

  const double w = 640, h = 400, left = 64, right = 190, top = 40, bottom = 56;
  const double pw = w - left - right, ph = h - top - bottom;
  double xmin = rows.front().percent, xmax = xmin, ymax = 0.0;
  for (const auto& r : rows) {
    xmin = std::min(xmin, r.percent);
    xmax = std::max(xmax, r.percent);
    ymax = std::max(ymax, value(r));
  }
  // Recall lives in [0, 1]; ranks get headroom above the largest value.
  ymax = metric == "med_rank" ? std::max(1.0, std::ceil(ymax * 1.1)) : 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - y / ymax * ph; };

  std::map<std::string, std::vector<const CurveRow*>> series;
  for (const auto& r : rows) series[r.model + " " + r.direction].push_back(&r);

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n";
  s << "<metadata data-csv-sha256=\"" << sha256_hex(csv) << "\" data-metric=\"" << escape(metric) << "\"/>\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  std::set<std::string> xticks;
  for (const auto& r : rows)
    if (xticks.insert(r.text[0]).second)
      s << "<text x=\"" << num(sx(r.percent)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << escape(r.text[0]) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = ymax * i / 4.0;
    s << "<text x=\"" << left - 8 << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">" << num(y)
      << "</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << left + pw << "\" y2=\"" << num(sy(y))
      << "\" stroke=\"#ddd\"/>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 14 << "\" text-anchor=\"middle\">pretraining data (%)</text>\n";
  s << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(metric) << "</text>\n";

  std::size_t k = 0;
  for (auto& [name, pts] : series) {
    std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->percent < b->percent; });
    const char* color = kColors[k % std::size(kColors)];
    s << "<g data-series=\"" << escape(name) << "\">\n<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      s << (i ? " " : "") << num(sx(pts[i]->percent)) << ',' << num(sy(value(*pts[i])));
    s << "\"/>\n";
    for (const auto* p : pts)
      s << "<circle cx=\"" << num(sx(p->percent)) << "\" cy=\"" << num(sy(value(*p))) << "\" r=\"3\" fill=\""
        << color << "\" data-percent=\"" << escape(p->text[0]) << "\" data-value=\""
        << escape(p->text[col->second]) << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    s << "<line x1=\"" << left + pw + 14 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 34 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly << "\">" << escape(name) << "</text>\n</g>\n";
    ++k;
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace avc::cli
