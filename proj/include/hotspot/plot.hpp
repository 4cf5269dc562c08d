#pragma once

// Minimal SVG line plots for report curves.

#include <filesystem>
#include <string>
#include <vector>

namespace hotspot {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::vector<PlotSeries>& series);

}  // namespace hotspot
