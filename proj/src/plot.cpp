#include "hotspot/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hotspot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::vector<PlotSeries>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t n = 0; n < s.x.size() && n < s.y.size(); ++n) {
      if (!std::isfinite(s.y[n])) continue;
      x0 = std::min(x0, s.x[n]);
      x1 = std::max(x1, s.x[n]);
      y0 = std::min(y0, s.y[n]);
      y1 = std::max(y1, s.y[n]);
    }
  if (!(x1 > x0)) { x0 = 0.0; x1 = std::max(1.0, x1); }
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)"
                     "\n", kWidth, kHeight);
  out << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)" "\n", kWidth, kHeight);
  out << fmt::format(R"(<text x="{}" y="22" font-size="14">{}</text>)" "\n", kLeft, escape(title));
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>)" "\n",
                     kLeft, kTop, pw, ph);
  for (int tick = 0; tick <= 4; ++tick) {
    const double yv = y0 + (y1 - y0) * tick / 4.0;
    const double xv = x0 + (x1 - x0) * tick / 4.0;
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="end">{:.3g}</text>)" "\n", kLeft - 6, py(yv) + 4, yv);
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{:.3g}</text>)" "\n", px(xv), kTop + ph + 18, xv);
  }
  out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{}</text>)" "\n", kLeft + pw / 2,
                     kHeight - 10, escape(x_label));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    std::string points;
    for (std::size_t n = 0; n < series[s].x.size() && n < series[s].y.size(); ++n)
      if (std::isfinite(series[s].y[n]))
        points += fmt::format("{:.1f},{:.1f} ", px(series[s].x[n]), py(series[s].y[n]));
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)" "\n", color, points);
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(s);
    out << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)" "\n",
                       kWidth - kRight + 12, ly - 4, kWidth - kRight + 32, ly - 4, color);
    out << fmt::format(R"(<text x="{}" y="{}">{}</text>)" "\n", kWidth - kRight + 38, ly, escape(series[s].label));
  }
  out << "</svg>\n";
}

}  // namespace hotspot
