//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_SVG_HPP
#define KINLAB_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

// Minimal deterministic SVG plotting: axes, scatter points, polylines and
// dashed fit lines. No timestamps or other run-dependent content appears in
// the output, so identical data yields identical bytes.

class SvgPlot {
 public:
  SvgPlot(std::string x_label, std::string y_label, bool log_x = false,
          bool log_y = false)
      : x_label_(std::move(x_label)),
        y_label_(std::move(y_label)),
        log_x_(log_x),
        log_y_(log_y) {}

  void add_points(const std::vector<double> &x, const std::vector<double> &y,
                  const std::string &color) {
    if (x.size() != y.size())
      throw Error("ShapeMismatch", "svg point vectors differ in length");
    series_.push_back({x, y, color, Kind::kPoints});
    extend_range(x, y);
  }

  void add_polyline(const std::vector<double> &x,
                    const std::vector<double> &y, const std::string &color,
                    bool dashed = false) {
    if (x.size() != y.size())
      throw Error("ShapeMismatch", "svg line vectors differ in length");
    series_.push_back({x, y, color, dashed ? Kind::kDashed : Kind::kLine});
    extend_range(x, y);
  }

  std::string render() const {
    if (series_.empty()) throw Error("InvalidConfig", "empty plot");
    double x_lo = x_min_, x_hi = x_max_, y_lo = y_min_, y_hi = y_max_;
    pad(x_lo, x_hi);
    pad(y_lo, y_hi);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    // Axes.
    out << "<line x1=\"" << kMargin << "\" y1=\"" << (kHeight - kMargin)
        << "\" x2=\"" << (kWidth - kMargin) << "\" y2=\""
        << (kHeight - kMargin) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
        << kMargin << "\" y2=\"" << (kHeight - kMargin)
        << "\" stroke=\"black\"/>\n";
    ticks(out, x_lo, x_hi, y_lo, y_hi);
    out << "<text x=\"" << (kWidth / 2) << "\" y=\"" << (kHeight - 8)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label_
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << (kHeight / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 "
           "14 "
        << (kHeight / 2) << ")\">" << y_label_ << "</text>\n";

    for (const auto &s : series_) {
      if (s.kind == Kind::kPoints) {
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << "<circle cx=\"" << fmt(map_x(s.x[i], x_lo, x_hi))
              << "\" cy=\"" << fmt(map_y(s.y[i], y_lo, y_hi))
              << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
      } else {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\"";
        if (s.kind == Kind::kDashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << (i ? " " : "") << fmt(map_x(s.x[i], x_lo, x_hi)) << ","
              << fmt(map_y(s.y[i], y_lo, y_hi));
        out << "\"/>\n";
      }
    }
    out << "</svg>\n";
    return out.str();
  }

  void save(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoFailure", "cannot write " + path);
    out << render();
  }

 private:
  enum class Kind { kPoints, kLine, kDashed };
  struct Series {
    std::vector<double> x, y;
    std::string color;
    Kind kind;
  };

  static constexpr int kWidth = 560;
  static constexpr int kHeight = 400;
  static constexpr int kMargin = 56;

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  static std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }

  double tx(double v) const {
    if (!log_x_) return v;
    if (!(v > 0.0)) throw Error("InvalidConfig", "log axis needs positive x");
    return std::log10(v);
  }

  double ty(double v) const {
    if (!log_y_) return v;
    if (!(v > 0.0)) throw Error("InvalidConfig", "log axis needs positive y");
    return std::log10(v);
  }

  void extend_range(const std::vector<double> &x,
                    const std::vector<double> &y) {
    for (double v : x) {
      x_min_ = std::min(x_min_, tx(v));
      x_max_ = std::max(x_max_, tx(v));
    }
    for (double v : y) {
      y_min_ = std::min(y_min_, ty(v));
      y_max_ = std::max(y_max_, ty(v));
    }
  }

  static void pad(double &lo, double &hi) {
    double span = hi - lo;
    if (span <= 0.0) span = std::max(std::abs(lo), 1.0);
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }

  double map_x(double v, double lo, double hi) const {
    return kMargin + (tx(v) - lo) / (hi - lo) * (kWidth - 2 * kMargin);
  }

  double map_y(double v, double lo, double hi) const {
    return (kHeight - kMargin) -
           (ty(v) - lo) / (hi - lo) * (kHeight - 2 * kMargin);
  }

  void ticks(std::ostringstream &out, double x_lo, double x_hi, double y_lo,
             double y_hi) const {
    for (int i = 0; i <= 4; ++i) {
      double fx = x_lo + (x_hi - x_lo) * i / 4.0;
      double fy = y_lo + (y_hi - y_lo) * i / 4.0;
      double px = kMargin + (kWidth - 2.0 * kMargin) * i / 4.0;
      double py = (kHeight - kMargin) - (kHeight - 2.0 * kMargin) * i / 4.0;
      double x_value = log_x_ ? std::pow(10.0, fx) : fx;
      double y_value = log_y_ ? std::pow(10.0, fy) : fy;
      out << "<line x1=\"" << fmt(px) << "\" y1=\"" << (kHeight - kMargin)
          << "\" x2=\"" << fmt(px) << "\" y2=\"" << (kHeight - kMargin + 5)
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << fmt(px) << "\" y=\"" << (kHeight - kMargin + 18)
          << "\" font-size=\"10\" text-anchor=\"middle\">"
          << fmt_tick(x_value) << "</text>\n";
      out << "<line x1=\"" << (kMargin - 5) << "\" y1=\"" << fmt(py)
          << "\" x2=\"" << kMargin << "\" y2=\"" << fmt(py)
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << (kMargin - 8) << "\" y=\"" << fmt(py + 3)
          << "\" font-size=\"10\" text-anchor=\"end\">" << fmt_tick(y_value)
          << "</text>\n";
    }
  }

  std::string x_label_, y_label_;
  bool log_x_, log_y_;
  std::vector<Series> series_;
  double x_min_ = std::numeric_limits<double>::infinity();
  double x_max_ = -std::numeric_limits<double>::infinity();
  double y_min_ = std::numeric_limits<double>::infinity();
  double y_max_ = -std::numeric_limits<double>::infinity();
};

}  // namespace kinlab

#endif  // KINLAB_SVG_HPP
