#pragma once

#include <string>

#include "rudu/io/formats.hpp"

namespace rudu::io {

struct RenderOptions {
  int cell_px = 24;
  int margin_px = 16;
};

/// SVG drawing of a packing. Each item is one <g> of rectangles, one per run
/// of adjacent rows, coloured by item id. The dashed outline marks the
/// optimized bin (W~, H~), where W~ is the rightmost occupied column.
std::string render_svg(const PackResult& result, const RenderOptions& options = {});

}  // namespace rudu::io
