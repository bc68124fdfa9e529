#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lacldp::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // non-finite values break the line
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // x intervals drawn as shaded bands (e.g. where a rate is +infinity).
  std::vector<std::pair<double, double>> shaded;
  std::string shaded_label = "+inf";
};

// Self-contained 960x540 SVG with linear axes and tick labels. The CRC-32 of
// the sibling CSV is embedded as a comment.
std::string render_svg(const LinePlot& plot, const std::string& csv_crc32);

}  // namespace lacldp::cli
