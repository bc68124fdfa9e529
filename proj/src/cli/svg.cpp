#include "lacldp/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lacldp::cli {

namespace {

constexpr double kWidth = 960, kHeight = 540;
constexpr double kLeft = 80, kRight = 180, kTop = 50, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// About five round ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

struct Box {
  double xlo, xhi, ylo, yhi;
  double px(double x) const { return kLeft + (x - xlo) / (xhi - xlo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - ylo) / (yhi - ylo) * (kHeight - kTop - kBottom); }
};

Box bounds(const LinePlot& plot) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i])) continue;
      b.xlo = std::min(b.xlo, s.x[i]);
      b.xhi = std::max(b.xhi, s.x[i]);
      if (!std::isfinite(s.y[i])) continue;
      b.ylo = std::min(b.ylo, s.y[i]);
      b.yhi = std::max(b.yhi, s.y[i]);
    }
  }
  for (const auto& [a, c] : plot.shaded) {
    b.xlo = std::min(b.xlo, a);
    b.xhi = std::max(b.xhi, c);
  }
  if (!std::isfinite(b.xlo)) b.xlo = 0, b.xhi = 1;
  if (!std::isfinite(b.ylo)) b.ylo = 0, b.yhi = 1;
  if (b.xhi - b.xlo < 1e-12) b.xlo -= 0.5, b.xhi += 0.5;
  if (b.yhi - b.ylo < 1e-12) b.ylo -= 0.5, b.yhi += 0.5;
  const double pad = 0.05 * (b.yhi - b.ylo);
  b.ylo -= pad;
  b.yhi += pad;
  return b;
}

}  // namespace

std::string render_svg(const LinePlot& plot, const std::string& csv_crc32) {
  const Box b = bounds(plot);
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" viewBox=\"0 0 960 540\">\n";
  s += "<!-- csv-crc32: " + csv_crc32 + " -->\n";
  s += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
  s += "<text x=\"480\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" +
       escape(plot.title) + "</text>\n";

  const double top = kTop, bottom = kHeight - kBottom;
  for (const auto& [a, c] : plot.shaded) {
    const double x0 = b.px(a), x1 = b.px(c);
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(0.0, x1 - x0)) +
         "\" height=\"" + num(bottom - top) + "\" fill=\"#bbbbbb\" fill-opacity=\"0.4\"/>\n";
  }

  // Axes and ticks.
  s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(kWidth - kLeft - kRight) +
       "\" height=\"" + num(bottom - top) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double t : ticks(b.xlo, b.xhi)) {
    const double x = b.px(t);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(x) + "\" y2=\"" + num(bottom + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 20) + "\" text-anchor=\"middle\">" + tick_label(t) +
         "</text>\n";
  }
  for (double t : ticks(b.ylo, b.yhi)) {
    const double y = b.py(t);
    s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
         "</text>\n";
  }
  s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
  s += "<text x=\"20\" y=\"" + num((top + bottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       num((top + bottom) / 2) + ")\">" + escape(plot.y_label) + "</text>\n";
  s += "</g>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& ser = plot.series[k];
    const char* colour = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : (path.empty() ? "M" : " M")) + num(b.px(ser.x[i])) + " " + num(b.py(ser.y[i]));
      pen_down = true;
    }
    if (!path.empty()) {
      s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = top + 10 + 20 * static_cast<double>(k);
    const double lx = kWidth - kRight + 15;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(ser.name) + "</text>\n";
  }
  if (!plot.shaded.empty()) {
    const double ly = top + 10 + 20 * static_cast<double>(plot.series.size());
    const double lx = kWidth - kRight + 15;
    s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 6) + "\" width=\"20\" height=\"12\" fill=\"#bbbbbb\" "
         "fill-opacity=\"0.4\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(plot.shaded_label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace lacldp::cli
