#pragma once

// Minimal self-contained SVG line/scatter plots with axes, ticks and a legend.
// Output contains no timestamps or random ids, so identical data gives identical bytes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "phaselens/error.hpp"

namespace phaselens::svg {

enum class Style { line, points };

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  Style style = Style::line;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
  bool show_legend = true;
};

namespace detail {

inline constexpr double kWidth = 720.0;
inline constexpr double kHeight = 480.0;
inline constexpr double kLeft = 80.0;
inline constexpr double kRight = 170.0;
inline constexpr double kTop = 40.0;
inline constexpr double kBottom = 60.0;

inline constexpr std::array<const char*, 10> kPalette{
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string escape(std::string_view s) {
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
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (hi == lo) {
      const double d = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.05;
      lo -= d;
      hi += d;
    } else {
      const double d = (hi - lo) * 0.04;
      lo -= d;
      hi += d;
    }
  }
};

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

}  // namespace detail

inline std::string render(const Plot& plot) {
  using namespace detail;
  Range xr, yr;
  std::size_t drawable = 0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("svg: series '" + s.name + "' x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (plot.log_y && !(s.y[i] > 0.0)) continue;
      xr.add(s.x[i]);
      yr.add(plot.log_y ? std::log10(s.y[i]) : s.y[i]);
      ++drawable;
    }
  }
  if (drawable == 0) throw InvalidArgument("svg: nothing to plot for '" + plot.title + "'");
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : linear_ticks(xr.lo, xr.hi)) {
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
      << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  std::vector<double> yticks;
  if (plot.log_y) {
    for (double d = std::ceil(yr.lo); d <= yr.hi; d += 1.0) yticks.push_back(d);
    if (yticks.size() > 12) {
      std::vector<double> thin;
      const std::size_t every = (yticks.size() + 9) / 10;
      for (std::size_t i = 0; i < yticks.size(); i += every) thin.push_back(yticks[i]);
      yticks = std::move(thin);
    }
  } else {
    yticks = linear_ticks(yr.lo, yr.hi);
  }
  for (double t : yticks) {
    const double y = py(t);
    const std::string label = plot.log_y ? "1e" + tick_label(t) : tick_label(t);
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << label << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  const std::string ylab = plot.log_y ? plot.y_label + " (log scale)" : plot.y_label;
  o << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << num(kTop + ph / 2) << ")\">" << escape(ylab) << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = kPalette[si % kPalette.size()];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (plot.log_y && !(s.y[i] > 0.0)) continue;
      const double yv = plot.log_y ? std::log10(s.y[i]) : s.y[i];
      if (s.style == Style::line) {
        if (!pts.empty()) pts += ' ';
        pts += num(px(s.x[i])) + "," + num(py(yv));
      } else {
        o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(yv))
          << "\" r=\"2\" fill=\"" << color << "\"/>\n";
      }
    }
    if (s.style == Style::line && !pts.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"" << pts
        << "\"/>\n";
    }
    if (plot.show_legend) {
      const double ly = kTop + 10 + 18.0 * static_cast<double>(si);
      const double lx = kLeft + pw + 15;
      o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
      o << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name)
        << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

inline void emit_svg(const Plot& plot, const std::filesystem::path& path) {
  const std::string body = render(plot);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

}  // namespace phaselens::svg
