#pragma once

// SVG pictures of the 2-dimensional torus R^3/R1 in the chart (x1 - x3, x2 - x3).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "troploc/core.hpp"

namespace troploc::plot {

struct Marker {
  std::string label;
  TorusPoint point;
};

struct Options {
  std::uint64_t seed = 1;
  int raster = 120;      // hull cells per axis
  int samples = 1500;    // sampled max-combinations
  double size = 480.0;   // drawing area in px
};

inline std::pair<double, double> chart(const TorusPoint& p) { return {p[0] - p[2], p[1] - p[2]}; }

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Markers at the same chart position (within 1e-3) collapse into one whose
/// label lists every contributor in order.
inline std::vector<Marker> merge_markers(const std::vector<Marker>& in) {
  std::vector<Marker> out;
  for (const auto& m : in) {
    const auto [x, y] = chart(m.point);
    auto it = std::find_if(out.begin(), out.end(), [&](const Marker& o) {
      const auto [ox, oy] = chart(o.point);
      return std::abs(ox - x) <= 1e-3 && std::abs(oy - y) <= 1e-3;
    });
    if (it == out.end()) {
      out.push_back(m);
    } else {
      it->label += ", " + m.label;
    }
  }
  return out;
}

/// Layers, bottom to top: hull raster, sampled max-combinations, input points,
/// optima. Output depends only on the arguments.
inline std::string render_svg(const PointCloud& points, const std::vector<Marker>& optima, const Options& opt = {}) {
  if (points.dim() != 3) throw InputError("plotting is defined only for n=3");
  for (const auto& m : optima) {
    if (m.point.dim() != 3) throw InputError("plotting is defined only for n=3");
  }
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  auto grow = [&](const TorusPoint& p) {
    const auto [x, y] = chart(p);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& p : points) grow(p);
  for (const auto& m : optima) grow(m.point);
  const double span = std::max({x1 - x0, y1 - y0, 1.0});
  const double pad = 0.15 * span;
  x0 -= pad;
  y0 -= pad;
  const double extent = span + 2.0 * pad;
  const double margin = 40.0;
  const double scale = opt.size / extent;
  auto sx = [&](double x) { return margin + (x - x0) * scale; };
  auto sy = [&](double y) { return margin + opt.size - (y - y0) * scale; };
  const double total = opt.size + 2.0 * margin;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(total) + "\" height=\"" +
         detail::num(total) + "\" viewBox=\"0 0 " + detail::num(total) + " " + detail::num(total) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(total) + "\" height=\"" + detail::num(total) +
         "\" fill=\"white\"/>\n";

  svg += "<g id=\"hull\" fill=\"#d9d9d9\" stroke=\"none\">\n";
  const double cell = extent / opt.raster;
  for (int i = 0; i < opt.raster; ++i) {
    for (int j = 0; j < opt.raster; ++j) {
      const double cx = x0 + (i + 0.5) * cell;
      const double cy = y0 + (j + 0.5) * cell;
      if (!in_hull_max(points, TorusPoint{cx, cy, 0.0}, 1e-9)) continue;
      svg += "<rect x=\"" + detail::num(sx(cx - cell / 2)) + "\" y=\"" + detail::num(sy(cy + cell / 2)) +
             "\" width=\"" + detail::num(cell * scale) + "\" height=\"" + detail::num(cell * scale) + "\"/>\n";
    }
  }
  svg += "</g>\n";

  svg += "<g id=\"samples\" fill=\"#7f7f7f\">\n";
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coef(-span, 0.0);
  std::vector<double> mu(points.size());
  for (int s = 0; s < opt.samples; ++s) {
    for (double& v : mu) v = coef(rng);
    const auto q = max_combination(points, mu);
    const auto [x, y] = chart(q);
    svg += "<circle cx=\"" + detail::num(sx(x)) + "\" cy=\"" + detail::num(sy(y)) + "\" r=\"0.8\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"points\" fill=\"#6a3d9a\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = chart(points[i]);
    svg += "<circle cx=\"" + detail::num(sx(x)) + "\" cy=\"" + detail::num(sy(y)) + "\" r=\"4\"/>\n";
    svg += "<text x=\"" + detail::num(sx(x) + 6) + "\" y=\"" + detail::num(sy(y) - 6) + "\">v" + std::to_string(i + 1) +
           "</text>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"optima\" fill=\"none\" stroke=\"#e31a1c\" stroke-width=\"2\" font-family=\"sans-serif\" "
         "font-size=\"12\">\n";
  for (const auto& m : merge_markers(optima)) {
    const auto [x, y] = chart(m.point);
    const double px = sx(x), py = sy(y);
    svg += "<path d=\"M " + detail::num(px - 6) + " " + detail::num(py - 6) + " L " + detail::num(px + 6) + " " +
           detail::num(py + 6) + " M " + detail::num(px - 6) + " " + detail::num(py + 6) + " L " +
           detail::num(px + 6) + " " + detail::num(py - 6) + "\"/>\n";
    svg += "<text x=\"" + detail::num(px + 8) + "\" y=\"" + detail::num(py + 14) + "\" fill=\"#e31a1c\" stroke=\"none\">" +
           detail::escape(m.label) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace troploc::plot
