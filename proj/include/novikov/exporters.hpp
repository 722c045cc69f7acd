#pragma once

#include <string>
#include <vector>

#include "novikov/levelsets.hpp"

namespace novikov {

/// SVG render of a level-set analysis: the fundamental parallelogram, the net
/// (or contour set) in black, below-cells in one hatch and above-cells in the
/// other. Output is byte-deterministic for identical inputs.
struct SvgOptions {
  double width_px = 760.0;
  bool draw_domain = true;
  bool hatch_regions = true;
  double level = 0.0;  // level used for the region fills
};

void write_contours_svg(const std::string& path, const ScalarGrid& grid,
                        const std::vector<Polyline>& contours, const SvgOptions& opt);

/// CSV of contour vertices: polyline_id,x,y,closed,p,q
void write_contours_csv(const std::string& path, const std::vector<Polyline>& contours);

/// Flat binary grid: 8-byte magic "NVGRID01", u32 nx, u32 ny (little-endian),
/// then row-major float64 values.
void write_grid_nv(const std::string& path, const ScalarGrid& grid);
ScalarGrid read_grid_nv(const std::string& path);

/// Grayscale heatmap (PPM P6).
void write_grid_ppm(const std::string& path, const ScalarGrid& grid);

}  // namespace novikov
