#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace entroute {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool draw_lines = true;
  int width = 760;
  int height = 500;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1-2-5 ladder of round tick steps covering [lo, hi].
inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

inline std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(std::log10(lo))); std::pow(10.0, e) <= hi * (1 + 1e-12);
       ++e) {
    const double t = std::pow(10.0, e);
    if (t >= lo * (1 - 1e-12)) ticks.push_back(t);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace svg_detail

// Self-contained SVG scatter/line plot. Pure presentation: points are drawn
// as given, non-finite values (and non-positive ones on a log axis) are
// skipped. Byte output is deterministic for identical input.
inline std::string render_svg_plot(const std::vector<PlotSeries>& series,
                                   const PlotOptions& options) {
  using namespace svg_detail;
  const double left = 70, right = 170, top = 42, bottom = 52;
  const double pw = options.width - left - right;
  const double ph = options.height - top - bottom;

  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  std::size_t n_points = 0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (options.log_y && !(y > 0.0)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
      ++n_points;
    }
  }

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
     << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << escape(options.title) << "</text>\n";

  // axes frame
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(options.height - 14.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << escape(options.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(top + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
     << num(top + ph / 2) << ")\">" << escape(options.y_label) << "</text>\n";

  if (n_points == 0) {
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(top + ph / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#777\">"
          "no data</text>\n";
    os << "</svg>\n";
    return os.str();
  }

  if (min_x == max_x) {
    min_x -= 1.0;
    max_x += 1.0;
  }
  if (min_y == max_y) {
    if (options.log_y) {
      min_y /= 2.0;
      max_y *= 2.0;
    } else {
      min_y -= 1.0;
      max_y += 1.0;
    }
  }
  const double pad_x = (max_x - min_x) * 0.04;
  min_x -= pad_x;
  max_x += pad_x;
  if (!options.log_y) {
    const double pad_y = (max_y - min_y) * 0.06;
    min_y -= pad_y;
    max_y += pad_y;
  } else {
    min_y /= 1.3;
    max_y *= 1.3;
  }

  const auto sx = [&](double x) { return left + (x - min_x) / (max_x - min_x) * pw; };
  const auto sy = [&](double y) {
    const double t = options.log_y ? (std::log10(y) - std::log10(min_y)) /
                                         (std::log10(max_y) - std::log10(min_y))
                                   : (y - min_y) / (max_y - min_y);
    return top + ph - t * ph;
  };

  for (const double t : linear_ticks(min_x, max_x)) {
    const double x = sx(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << tick_label(t)
       << "</text>\n";
  }
  const auto y_ticks = options.log_y ? decade_ticks(min_y, max_y) : linear_ticks(min_y, max_y);
  for (const double t : y_ticks) {
    const double y = sy(t);
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left)
       << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + pw)
       << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << tick_label(t)
       << "</text>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (options.log_y && !(y > 0.0)) continue;
      pts.emplace_back(x, y);
    }
    std::sort(pts.begin(), pts.end());
    if (options.draw_lines && pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) os << num(sx(x)) << "," << num(sy(y)) << " ";
      os << "\"/>\n";
    }
    for (const auto& [x, y] : pts) {
      os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"2.5\" fill=\""
         << color << "\"/>\n";
    }
    const double ly = top + 14 + 16.0 * i;
    os << "<rect x=\"" << num(left + pw + 12) << "\" y=\"" << num(ly - 8)
       << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << num(left + pw + 27) << "\" y=\"" << num(ly + 1)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[i].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace entroute
