#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "soibart/errors.hpp"

namespace soibart {

// Static SVG figures: enough to eyeball a periodogram, a correlogram and a
// forecast fan without any plotting dependency.
namespace svg {

struct Frame {
  double width = 860, height = 420;
  double left = 64, right = 16, top = 28, bottom = 42;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  double x(double v) const {
    return left + (v - x_min) / (x_max - x_min) * (width - left - right);
  }
  double y(double v) const {
    return height - bottom - (v - y_min) / (y_max - y_min) * (height - top - bottom);
  }
};

inline std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline void expand_range(const std::vector<double>& values, double& lo, double& hi) {
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

inline std::string header(const Frame& f, const std::string& title) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) +
                    "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + " " +
                    num(f.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(f.width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         title + "</text>\n";
  return out;
}

inline std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label) {
  std::string out;
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.height - f.bottom) + "\" x2=\"" +
         num(f.width - f.right) + "\" y2=\"" + num(f.height - f.bottom) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) +
         "\" y2=\"" + num(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = f.x_min + (f.x_max - f.x_min) * i / 4.0;
    const double fy = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    out += "<text x=\"" + num(f.x(fx)) + "\" y=\"" + num(f.height - f.bottom + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(fx) +
           "</text>\n";
    out += "<text x=\"" + num(f.left - 6) + "\" y=\"" + num(f.y(fy) + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(fy) +
           "</text>\n";
  }
  out += "<text x=\"" + num((f.left + f.width - f.right) / 2) + "\" y=\"" + num(f.height - 8) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + x_label +
         "</text>\n";
  out += "<text x=\"14\" y=\"" + num((f.top + f.height - f.bottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 14 " +
         num((f.top + f.height - f.bottom) / 2) + ")\">" + y_label + "</text>\n";
  return out;
}

inline std::string polyline(const Frame& f, const std::vector<double>& xs,
                            const std::vector<double>& ys, const std::string& color,
                            double stroke_width = 1.0) {
  std::string out = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                    num(stroke_width) + "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += num(f.x(xs[i])) + "," + num(f.y(ys[i])) + " ";
  out += "\"/>\n";
  return out;
}

}  // namespace svg

inline std::string svg_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const std::string& title, const std::string& x_label,
                                 const std::string& y_label) {
  if (xs.size() != ys.size() || xs.empty())
    fail(ErrorCode::LengthMismatch, "x/y size mismatch in plot");
  svg::Frame f;
  f.x_min = xs.front();
  f.x_max = xs.back();
  double lo = ys[0], hi = ys[0];
  svg::expand_range(ys, lo, hi);
  if (lo == hi) hi = lo + 1.0;
  f.y_min = lo;
  f.y_max = hi;
  std::string out = svg::header(f, title);
  out += svg::axes(f, x_label, y_label);
  out += svg::polyline(f, xs, ys, "steelblue");
  out += "</svg>\n";
  return out;
}

// Stem plot with symmetric confidence bands; the correlogram layout.
inline std::string svg_stem_plot(const std::vector<double>& values, double band,
                                 const std::string& title, const std::string& y_label) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "nothing to plot");
  svg::Frame f;
  f.x_min = 0;
  f.x_max = static_cast<double>(values.size()) + 1;
  double lo = std::min(-band * 1.3, -0.1), hi = std::max(band * 1.3, 0.1);
  svg::expand_range(values, lo, hi);
  f.y_min = lo - 0.05;
  f.y_max = hi + 0.05;
  std::string out = svg::header(f, title);
  out += svg::axes(f, "lag (months)", y_label);
  const double y0 = f.y(0.0);
  out += "<line x1=\"" + svg::num(f.left) + "\" y1=\"" + svg::num(y0) + "\" x2=\"" +
         svg::num(f.width - f.right) + "\" y2=\"" + svg::num(y0) + "\" stroke=\"gray\"/>\n";
  for (double b : {band, -band}) {
    out += "<line x1=\"" + svg::num(f.left) + "\" y1=\"" + svg::num(f.y(b)) + "\" x2=\"" +
           svg::num(f.width - f.right) + "\" y2=\"" + svg::num(f.y(b)) +
           "\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = f.x(static_cast<double>(i + 1));
    out += "<line x1=\"" + svg::num(x) + "\" y1=\"" + svg::num(y0) + "\" x2=\"" + svg::num(x) +
           "\" y2=\"" + svg::num(f.y(values[i])) + "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

// History tail, point path, and nested quantile bands.
inline std::string svg_fan_chart(const std::vector<double>& history,
                                 const std::vector<double>& point,
                                 const std::vector<double>& levels,
                                 const std::vector<std::vector<double>>& quantiles,
                                 const std::string& title) {
  if (point.empty()) fail(ErrorCode::EmptyInput, "nothing to plot");
  svg::Frame f;
  const double n_hist = static_cast<double>(history.size());
  f.x_min = -n_hist;
  f.x_max = static_cast<double>(point.size());
  double lo = point[0], hi = point[0];
  svg::expand_range(history, lo, hi);
  svg::expand_range(point, lo, hi);
  for (const auto& row : quantiles) svg::expand_range(row, lo, hi);
  if (lo == hi) hi = lo + 1.0;
  f.y_min = lo - 0.05 * (hi - lo);
  f.y_max = hi + 0.05 * (hi - lo);

  std::string out = svg::header(f, title);
  out += svg::axes(f, "months from forecast origin", "index");

  // nested bands from outermost quantile pair inward
  if (!quantiles.empty() && levels.size() >= 2) {
    for (std::size_t pair = 0; pair < levels.size() / 2; ++pair) {
      const std::size_t lo_q = pair;
      const std::size_t hi_q = levels.size() - 1 - pair;
      std::string pts;
      for (std::size_t h = 0; h < quantiles.size(); ++h)
        pts += svg::num(f.x(static_cast<double>(h + 1))) + "," +
               svg::num(f.y(quantiles[h][lo_q])) + " ";
      for (std::size_t h = quantiles.size(); h-- > 0;)
        pts += svg::num(f.x(static_cast<double>(h + 1))) + "," +
               svg::num(f.y(quantiles[h][hi_q])) + " ";
      out += "<polygon points=\"" + pts + "\" fill=\"steelblue\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    }
  }

  std::vector<double> hx(history.size()), fx(point.size());
  for (std::size_t i = 0; i < history.size(); ++i)
    hx[i] = -n_hist + static_cast<double>(i) + 1.0;
  for (std::size_t h = 0; h < point.size(); ++h) fx[h] = static_cast<double>(h + 1);
  if (!history.empty()) out += svg::polyline(f, hx, history, "gray");
  out += svg::polyline(f, fx, point, "crimson", 1.6);
  out += "</svg>\n";
  return out;
}

}  // namespace soibart
