#pragma once

// Minimal self-contained SVG line and bar charts. Every series is drawn as one
// <polyline>; a series with a spread gets one <polygon> band (mean +/- spread).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "pdm/error.hpp"
#include "pdm/format.hpp"

namespace pdm {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> spread;  // optional, same length as y
  std::string color;           // empty: palette
};

struct ReferenceLine {
  enum class Axis { x, y } axis = Axis::y;
  double value = 0.0;
  std::string label;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<ReferenceLine> references;
  bool legend = true;
  double stroke_width = 2.0;
  int width = 760;
  int height = 460;
};

struct BarChartSpec {
  std::string title;
  std::string y_label;
  std::vector<std::string> categories;
  std::vector<Series> groups;  // y holds one value per category; x is ignored
  int width = 760;
  int height = 460;
};

namespace detail {

inline constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                     "#9467bd", "#8c564b", "#e377c2", "#17becf"};

inline std::string escape_xml(const std::string& s) {
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

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
  }
};

struct Frame {
  double left = 80, right = 20, top = 40, bottom = 60;
  int width = 0, height = 0;
  Range xr, yr;
  double px(double x) const { return left + (x - xr.lo) / (xr.hi - xr.lo) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - yr.lo) / (yr.hi - yr.lo) * (height - top - bottom); }
};

inline void draw_axes(std::string& svg, const Frame& f, const std::string& x_label, const std::string& y_label,
                      bool x_ticks = true) {
  const double x0 = f.left, x1 = f.width - f.right, y0 = f.height - f.bottom, y1 = f.top;
  svg += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) +
         "\" stroke=\"#000\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) +
         "\" stroke=\"#000\"/>\n";
  if (x_ticks) {
    const double step = nice_step(f.xr.hi - f.xr.lo, 8);
    for (double t = std::ceil(f.xr.lo / step) * step; t <= f.xr.hi + 1e-9 * step; t += step) {
      const double p = f.px(t);
      svg += "<line class=\"tick\" x1=\"" + num(p) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(p) + "\" y2=\"" +
             num(y0 + 5) + "\" stroke=\"#000\"/>\n";
      svg += "<text x=\"" + num(p) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\" font-size=\"11\">" +
             tick_label(t) + "</text>\n";
    }
  }
  const double ystep = nice_step(f.yr.hi - f.yr.lo, 6);
  for (double t = std::ceil(f.yr.lo / ystep) * ystep; t <= f.yr.hi + 1e-9 * ystep; t += ystep) {
    const double p = f.py(t);
    svg += "<line class=\"tick\" x1=\"" + num(x0 - 5) + "\" y1=\"" + num(p) + "\" x2=\"" + num(x0) + "\" y2=\"" +
           num(p) + "\" stroke=\"#000\"/>\n";
    svg += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(p + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
           tick_label(t) + "</text>\n";
  }
  svg += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(f.height - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape_xml(x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + num((y0 + y1) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" + escape_xml(y_label) + "</text>\n";
}

inline std::string header(int width, int height, const std::string& title) {
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                    std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape_xml(title) + "</text>\n";
  return svg;
}

inline void validate_series(const Series& s) {
  if (s.x.empty() || s.y.empty()) throw UsageError("plot: series '" + s.name + "' is empty");
  if (s.x.size() != s.y.size()) throw UsageError("plot: series '" + s.name + "' has mismatched x/y lengths");
  if (!s.spread.empty() && s.spread.size() != s.y.size()) {
    throw UsageError("plot: series '" + s.name + "' has mismatched spread length");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  };
  if (!finite(s.x) || !finite(s.y) || !finite(s.spread)) {
    throw UsageError("plot: series '" + s.name + "' has non-finite values");
  }
}

}  // namespace detail

inline std::string render_svg(const PlotSpec& spec) {
  if (spec.series.empty()) throw UsageError("plot: no series");
  for (const auto& s : spec.series) detail::validate_series(s);

  detail::Frame f;
  f.width = spec.width;
  f.height = spec.height;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      f.xr.add(s.x[i]);
      const double sp = s.spread.empty() ? 0.0 : s.spread[i];
      f.yr.add(s.y[i] - sp);
      f.yr.add(s.y[i] + sp);
    }
  }
  for (const auto& r : spec.references) (r.axis == ReferenceLine::Axis::x ? f.xr : f.yr).add(r.value);
  f.xr.pad();
  f.yr.pad();
  const double ypad = 0.05 * (f.yr.hi - f.yr.lo);
  f.yr.lo -= ypad;
  f.yr.hi += ypad;

  std::string svg = detail::header(spec.width, spec.height, spec.title);
  detail::draw_axes(svg, f, spec.x_label, spec.y_label);

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const std::string color = s.color.empty() ? detail::kPalette[k % detail::kPalette.size()] : s.color;
    if (!s.spread.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        pts += detail::num(f.px(s.x[i])) + "," + detail::num(f.py(s.y[i] + s.spread[i])) + " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        pts += detail::num(f.px(s.x[i])) + "," + detail::num(f.py(s.y[i] - s.spread[i])) + " ";
      }
      pts.pop_back();
      svg += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"" + color +
             "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      pts += detail::num(f.px(s.x[i])) + "," + detail::num(f.py(s.y[i])) + " ";
    }
    pts.pop_back();
    svg += "<polyline class=\"series\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"" + detail::num(spec.stroke_width) + "\"/>\n";
  }

  for (const auto& r : spec.references) {
    double x1, y1, x2, y2;
    if (r.axis == ReferenceLine::Axis::x) {
      x1 = x2 = f.px(r.value);
      y1 = f.py(f.yr.lo);
      y2 = f.py(f.yr.hi);
    } else {
      y1 = y2 = f.py(r.value);
      x1 = f.px(f.xr.lo);
      x2 = f.px(f.xr.hi);
    }
    svg += "<line class=\"reference\" x1=\"" + detail::num(x1) + "\" y1=\"" + detail::num(y1) + "\" x2=\"" +
           detail::num(x2) + "\" y2=\"" + detail::num(y2) + "\" stroke=\"#000\" stroke-dasharray=\"6,4\"/>\n";
    if (!r.label.empty()) {
      svg += "<text x=\"" + detail::num(x2 - 4) + "\" y=\"" + detail::num(y2 + 14) +
             "\" text-anchor=\"end\" font-size=\"11\">" + detail::escape_xml(r.label) + "</text>\n";
    }
  }

  if (spec.legend) {
    double y = f.top + 8;
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
      const auto& s = spec.series[k];
      const std::string color = s.color.empty() ? detail::kPalette[k % detail::kPalette.size()] : s.color;
      const double x = f.width - f.right - 170;
      svg += "<rect class=\"legend\" x=\"" + detail::num(x) + "\" y=\"" + detail::num(y - 9) +
             "\" width=\"14\" height=\"10\" fill=\"" + color + "\"/>\n";
      svg += "<text x=\"" + detail::num(x + 20) + "\" y=\"" + detail::num(y) + "\" font-size=\"12\">" +
             detail::escape_xml(s.name) + "</text>\n";
      y += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string render_bar_chart(const BarChartSpec& spec) {
  if (spec.categories.empty() || spec.groups.empty()) throw UsageError("bar chart: no data");
  for (const auto& g : spec.groups) {
    if (g.y.size() != spec.categories.size()) throw UsageError("bar chart: group '" + g.name + "' length mismatch");
  }
  detail::Frame f;
  f.width = spec.width;
  f.height = spec.height;
  f.xr = {0.0, static_cast<double>(spec.categories.size())};
  f.yr.add(0.0);
  for (const auto& g : spec.groups) {
    for (double v : g.y) {
      if (!std::isfinite(v)) throw UsageError("bar chart: non-finite value");
      f.yr.add(v);
    }
  }
  f.yr.pad();
  f.yr.hi += 0.1 * (f.yr.hi - f.yr.lo);

  std::string svg = detail::header(spec.width, spec.height, spec.title);
  detail::draw_axes(svg, f, "", spec.y_label, false);
  const double slot = 1.0 / static_cast<double>(spec.groups.size() + 1);
  for (std::size_t c = 0; c < spec.categories.size(); ++c) {
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
      const auto& grp = spec.groups[g];
      const std::string color = grp.color.empty() ? detail::kPalette[g % detail::kPalette.size()] : grp.color;
      const double x0 = f.px(static_cast<double>(c) + slot * (static_cast<double>(g) + 0.5));
      const double x1 = f.px(static_cast<double>(c) + slot * (static_cast<double>(g) + 1.5));
      const double ytop = f.py(std::max(0.0, grp.y[c]));
      const double ybot = f.py(std::min(0.0, grp.y[c]));
      svg += "<rect class=\"bar\" x=\"" + detail::num(x0) + "\" y=\"" + detail::num(ytop) + "\" width=\"" +
             detail::num(x1 - x0) + "\" height=\"" + detail::num(ybot - ytop) + "\" fill=\"" + color + "\"/>\n";
    }
    svg += "<text x=\"" + detail::num(f.px(static_cast<double>(c) + 0.5)) + "\" y=\"" +
           detail::num(f.height - f.bottom + 18) + "\" text-anchor=\"middle\" font-size=\"12\">" +
           detail::escape_xml(spec.categories[c]) + "</text>\n";
  }
  double y = f.top + 8;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& grp = spec.groups[g];
    const std::string color = grp.color.empty() ? detail::kPalette[g % detail::kPalette.size()] : grp.color;
    const double x = f.width - f.right - 170;
    svg += "<rect class=\"legend\" x=\"" + detail::num(x) + "\" y=\"" + detail::num(y - 9) +
           "\" width=\"14\" height=\"10\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + detail::num(x + 20) + "\" y=\"" + detail::num(y) + "\" font-size=\"12\">" +
           detail::escape_xml(grp.name) + "</text>\n";
    y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

// Renders first, so a rejected spec never leaves a file behind.
inline void emit_plot(const std::filesystem::path& path, const PlotSpec& spec) {
  write_file_atomic(path, render_svg(spec));
}

inline void emit_bar_chart(const std::filesystem::path& path, const BarChartSpec& spec) {
  write_file_atomic(path, render_bar_chart(spec));
}

}  // namespace pdm
