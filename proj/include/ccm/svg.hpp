#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/graph.hpp"
#include "ccm/stats_math.hpp"

namespace ccm {

// Minimal SVG emitter: traces and boxplots, nothing else.
class SvgCanvas {
public:
  SvgCanvas(int width, int height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
          << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    body_ << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  }

  int width() const { return width_; }
  int height() const { return height_; }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, const std::string& dash = "") {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
  }

  void polyline(std::span<const std::pair<double, double>> pts, const std::string& stroke,
                double stroke_width = 1.0) {
    if (pts.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "black") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12,
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << escaped(s)
          << "</text>\n";
  }

  std::string str() const { return body_.str() + "</svg>\n"; }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << str();
    if (!out) throw DataError("write failed: " + path);
  }

private:
  static std::string fmt(double v) {
    // Two decimals keep files small; precision is cosmetic here.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }
  static std::string escaped(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '&')
        out += "&amp;";
      else if (c == '<')
        out += "&lt;";
      else if (c == '>')
        out += "&gt;";
      else
        out.push_back(c);
    }
    return out;
  }

  int width_;
  int height_;
  std::ostringstream body_;
};

namespace detail {

struct LinearScale {
  double lo = 0.0, hi = 1.0, a = 0.0, b = 1.0;
  LinearScale(double vlo, double vhi, double plo, double phi) {
    if (vhi <= vlo) vhi = vlo + 1.0;
    lo = vlo;
    hi = vhi;
    a = (phi - plo) / (vhi - vlo);
    b = plo - vlo * a;
  }
  double operator()(double v) const { return a * v + b; }
};

} // namespace detail

// Trace with an optional moving-average smoother and a dashed truth line.
inline void svg_trace(const std::string& path, std::span<const double> values,
                      const std::string& title, double truth = std::nan("")) {
  const int w = 760, h = 300, ml = 50, mr = 15, mt = 30, mb = 30;
  SvgCanvas svg(w, h);
  if (!values.empty()) {
    double vlo = values[0], vhi = values[0];
    for (double v : values) {
      vlo = std::min(vlo, v);
      vhi = std::max(vhi, v);
    }
    if (!std::isnan(truth)) {
      vlo = std::min(vlo, truth);
      vhi = std::max(vhi, truth);
    }
    const double pad = (vhi - vlo) * 0.05 + 1e-12;
    detail::LinearScale sx(0, static_cast<double>(values.size() - 1), ml, w - mr);
    detail::LinearScale sy(vlo - pad, vhi + pad, h - mb, mt);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(values.size());
    for (std::size_t t = 0; t < values.size(); ++t)
      pts.emplace_back(sx(static_cast<double>(t)), sy(values[t]));
    svg.polyline(pts, "#888888", 1.0);

    const std::size_t win = std::max<std::size_t>(values.size() / 50, 2);
    std::vector<std::pair<double, double>> smooth;
    double acc = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
      acc += values[t];
      if (t >= win) acc -= values[t - win];
      if (t + 1 >= win)
        smooth.emplace_back(sx(static_cast<double>(t)),
                            sy(acc / static_cast<double>(win)));
    }
    svg.polyline(smooth, "#c02020", 1.6);

    if (!std::isnan(truth))
      svg.line(ml, sy(truth), w - mr, sy(truth), "#2040c0", 1.2, "6,4");

    svg.text(ml, h - 8, "1");
    svg.text(w - mr, h - 8, std::to_string(values.size()), 12, "end");
    svg.text(ml - 6, sy(vhi) + 4, format_double(vhi), 10, "end");
    svg.text(ml - 6, sy(vlo) + 4, format_double(vlo), 10, "end");
  }
  svg.text(ml, 18, title, 14);
  svg.save(path);
}

// Side-by-side box-and-whisker summaries, one box per labeled group.
inline void svg_boxplots(const std::string& path,
                         const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                         const std::string& title) {
  const int w = 120 + 90 * std::max<int>(1, static_cast<int>(groups.size())), h = 340;
  const int ml = 55, mt = 35, mb = 45;
  SvgCanvas svg(w, h);
  double vlo = INFINITY, vhi = -INFINITY;
  for (const auto& [name, vals] : groups)
    for (double v : vals) {
      vlo = std::min(vlo, v);
      vhi = std::max(vhi, v);
    }
  if (!groups.empty() && vlo <= vhi) {
    const double pad = (vhi - vlo) * 0.08 + 1e-12;
    detail::LinearScale sy(vlo - pad, vhi + pad, h - mb, mt);
    for (std::size_t gidx = 0; gidx < groups.size(); ++gidx) {
      auto vals = groups[gidx].second;
      if (vals.empty()) continue;
      std::sort(vals.begin(), vals.end());
      const double q1 = quantile_of(vals, 0.25);
      const double q2 = quantile_of(vals, 0.5);
      const double q3 = quantile_of(vals, 0.75);
      const double cx = ml + 45 + 90.0 * static_cast<double>(gidx);
      const double bw = 46.0;
      svg.line(cx, sy(vals.front()), cx, sy(q1), "black");
      svg.line(cx, sy(q3), cx, sy(vals.back()), "black");
      svg.line(cx - bw / 4, sy(vals.front()), cx + bw / 4, sy(vals.front()), "black");
      svg.line(cx - bw / 4, sy(vals.back()), cx + bw / 4, sy(vals.back()), "black");
      svg.rect(cx - bw / 2, sy(q3), bw, sy(q1) - sy(q3), "#d8e4f0");
      svg.line(cx - bw / 2, sy(q2), cx + bw / 2, sy(q2), "black", 1.6);
      svg.text(cx, h - 12, groups[gidx].first, 11, "middle");
    }
    svg.text(ml - 6, sy(vhi) + 4, format_double(vhi), 10, "end");
    svg.text(ml - 6, sy(vlo) + 4, format_double(vlo), 10, "end");
  }
  svg.text(ml, 20, title, 14);
  svg.save(path);
}

} // namespace ccm
