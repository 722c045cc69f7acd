#include "novikov/exporters.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "novikov/errors.hpp"

namespace novikov {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  // avoid the "-0.0000" wobble
  if (std::strcmp(buf, "-0.0000") == 0) return "0.0000";
  return buf;
}

void put_u32_le(std::ofstream& os, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t get_u32_le(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

}  // namespace

void write_contours_svg(const std::string& path, const ScalarGrid& grid,
                        const std::vector<Polyline>& contours, const SvgOptions& opt) {
  // bounding box of the domain parallelogram
  const Vec2 corners[4] = {grid.origin, grid.origin + grid.axis1,
                           grid.origin + grid.axis2,
                           grid.origin + grid.axis1 + grid.axis2};
  double xmin = corners[0].x, xmax = corners[0].x;
  double ymin = corners[0].y, ymax = corners[0].y;
  for (const Vec2& p : corners) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double pad = 0.03 * std::max(xmax - xmin, ymax - ymin);
  xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;
  const double scale = opt.width_px / (xmax - xmin);
  const double hpx = (ymax - ymin) * scale;

  const auto X = [&](double x) { return (x - xmin) * scale; };
  const auto Y = [&](double y) { return hpx - (y - ymin) * scale; };

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(opt.width_px)
     << "\" height=\"" << fmt(hpx) << "\" viewBox=\"0 0 " << fmt(opt.width_px) << " "
     << fmt(hpx) << "\">\n";
  os << "<defs>\n"
        "<pattern id=\"hminus\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
        "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
        "stroke=\"#4477aa\" stroke-width=\"1\"/></pattern>\n"
        "<pattern id=\"hplus\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
        "patternTransform=\"rotate(-45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
        "stroke=\"#cc6644\" stroke-width=\"1\"/></pattern>\n"
        "</defs>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (opt.hatch_regions && grid.nx > 0) {
    // run-length rectangles of below/above cells in grid coordinates;
    // rendered as parallelogram-aligned quads
    const auto cellquad = [&](int i0, int i1, int j, const char* fill) {
      const Vec2 p00 = grid.pos(i0, j), p10 = grid.pos(i1, j);
      const Vec2 p11 = grid.pos(i1, j + 1.0), p01 = grid.pos(i0, j + 1.0);
      os << "<polygon points=\"" << fmt(X(p00.x)) << "," << fmt(Y(p00.y)) << " "
         << fmt(X(p10.x)) << "," << fmt(Y(p10.y)) << " " << fmt(X(p11.x)) << ","
         << fmt(Y(p11.y)) << " " << fmt(X(p01.x)) << "," << fmt(Y(p01.y))
         << "\" fill=\"url(#" << fill << ")\" stroke=\"none\"/>\n";
    };
    for (int j = 0; j < grid.ny; ++j) {
      int i = 0;
      while (i < grid.nx) {
        const bool below = grid.at(i, j) < opt.level;
        int e = i + 1;
        while (e < grid.nx && (grid.at(e, j) < opt.level) == below) ++e;
        cellquad(i, e, j, below ? "hminus" : "hplus");
        i = e;
      }
    }
  }

  if (opt.draw_domain) {
    os << "<polygon points=\"" << fmt(X(corners[0].x)) << "," << fmt(Y(corners[0].y))
       << " " << fmt(X(corners[1].x)) << "," << fmt(Y(corners[1].y)) << " "
       << fmt(X(corners[3].x)) << "," << fmt(Y(corners[3].y)) << " "
       << fmt(X(corners[2].x)) << "," << fmt(Y(corners[2].y))
       << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  }

  int id = 0;
  for (const Polyline& pl : contours) {
    os << "<path id=\"c" << id << "\" data-winding=\"";
    if (pl.winding)
      os << pl.winding->x << "," << pl.winding->y;
    else
      os << "none";
    os << "\" d=\"";
    for (std::size_t k = 0; k < pl.pts.size(); ++k) {
      os << (k == 0 ? "M" : "L") << fmt(X(pl.pts[k].x)) << " " << fmt(Y(pl.pts[k].y));
    }
    if (pl.closed && (!pl.winding || pl.winding->zero())) os << "Z";
    os << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.4\"/>\n";
    ++id;
  }
  os << "</svg>\n";
}

void write_contours_csv(const std::string& path, const std::vector<Polyline>& contours) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os << "polyline_id,x,y,closed,p,q\n";
  char buf[128];
  for (std::size_t id = 0; id < contours.size(); ++id) {
    const Polyline& pl = contours[id];
    const long long p = pl.winding ? pl.winding->x : 0;
    const long long q = pl.winding ? pl.winding->y : 0;
    for (const Vec2& v : pl.pts) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%d,%lld,%lld\n", id, v.x, v.y,
                    pl.closed ? 1 : 0, p, q);
      os << buf;
    }
  }
}

void write_grid_nv(const std::string& path, const ScalarGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os.write("NVGRID01", 8);
  put_u32_le(os, std::uint32_t(grid.nx));
  put_u32_le(os, std::uint32_t(grid.ny));
  static_assert(sizeof(double) == 8);
  for (double v : grid.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = char((bits >> (8 * k)) & 0xff);
    os.write(b, 8);
  }
}

ScalarGrid read_grid_nv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "NVGRID01", 8) != 0)
    throw Error("bad NVGRID01 header in " + path);
  ScalarGrid g;
  g.nx = int(get_u32_le(is));
  g.ny = int(get_u32_le(is));
  if (g.nx <= 0 || g.ny <= 0 || std::size_t(g.nx) * g.ny > (std::size_t(1) << 28))
    throw Error("bad NVGRID01 dimensions in " + path);
  g.values.resize(std::size_t(g.nx) * g.ny);
  for (double& v : g.values) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= std::uint64_t(b[k]) << (8 * k);
    std::memcpy(&v, &bits, 8);
  }
  if (!is) throw Error("truncated NVGRID01 file " + path);
  g.axis1 = {1.0, 0.0};
  g.axis2 = {0.0, 1.0};
  return g;
}

void write_grid_ppm(const std::string& path, const ScalarGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  const auto [lo, hi] = grid.minmax();
  const double span = (hi > lo) ? hi - lo : 1.0;
  os << "P6\n" << grid.nx << " " << grid.ny << "\n255\n";
  for (int j = grid.ny - 1; j >= 0; --j)
    for (int i = 0; i < grid.nx; ++i) {
      const double t = (grid.at(i, j) - lo) / span;
      const auto g = static_cast<unsigned char>(std::clamp(t, 0.0, 1.0) * 255.0);
      const char px[3] = {char(g), char(g), char(g)};
      os.write(px, 3);
    }
}

}  // namespace novikov
