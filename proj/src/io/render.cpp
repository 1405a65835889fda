#include "rudu/io/render.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace rudu::io {

namespace {

// Qualitative palette (12 colours); ids beyond wrap around.
constexpr std::array<const char*, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

std::string render_svg(const PackResult& result, const RenderOptions& options) {
  const int cell = options.cell_px;
  const int margin = options.margin_px;

  int w_tilde = 0;
  int top = result.h_tilde;
  for (const auto& p : result.placements) {
    w_tilde = std::max(w_tilde, p.x + p.w);
    for (int r : p.rows) top = std::max(top, r + 1);
  }
  const int bin_w = std::max(result.w_star, w_tilde);
  const int rows = std::max(top, 1);
  const int width_px = 2 * margin + bin_w * cell;
  const int height_px = 2 * margin + rows * cell;
  // Row 0 sits at the bottom of the drawing.
  auto y_of = [&](int row_top) { return margin + (rows - row_top) * cell; };

  std::string svg = format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n",
      width_px, height_px, width_px, height_px);
  svg += format("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"white\" stroke=\"black\"/>\n",
                margin, margin, bin_w * cell, rows * cell);

  for (const auto& p : result.placements) {
    std::vector<int> sorted = p.rows;
    std::sort(sorted.begin(), sorted.end());
    svg += format("<g id=\"item-%d\" fill=\"%s\" stroke=\"black\" stroke-width=\"1\">\n", p.item,
                  kPalette[static_cast<std::size_t>(p.item) % kPalette.size()]);
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i + 1;
      while (j < sorted.size() && sorted[j] == sorted[j - 1] + 1) ++j;
      const int lo = sorted[i];
      const int hi = sorted[j - 1] + 1;
      svg += format("  <rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\"/>\n", margin + p.x * cell,
                    y_of(hi), p.w * cell, (hi - lo) * cell);
      i = j;
    }
    svg += "</g>\n";
  }

  svg += format(
      "<rect class=\"optimized-bin\" x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
      "stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n",
      margin, y_of(result.h_tilde), w_tilde * cell, result.h_tilde * cell);
  svg += "</svg>\n";
  return svg;
}

}  // namespace rudu::io
