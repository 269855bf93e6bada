#pragma once

// Curve output: JSON and SVG 1.1. Coordinates are printed with 9 significant
// digits so the emitted bytes are stable across runs given identical scenes.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "bandpat/extract.hpp"
#include "bandpat/render.hpp"

namespace bandpat {

namespace detail {

inline void append_g9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

inline void append_u64(std::string& out, std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  out += buf;
}

}  // namespace detail

// {"polylines":[{"idA":...,"idB":...,"closed":...,"points":[[x,y],...]}]}
inline std::string polylines_to_json(const std::vector<LabeledPolyline>& polylines) {
  std::string out = "{\"polylines\":[";
  bool first_poly = true;
  for (const LabeledPolyline& poly : polylines) {
    if (!first_poly) out += ',';
    first_poly = false;
    out += "\n{\"idA\":";
    detail::append_u64(out, poly.id_a);
    out += ",\"idB\":";
    detail::append_u64(out, poly.id_b);
    out += ",\"closed\":";
    out += poly.closed ? "true" : "false";
    out += ",\"points\":[";
    bool first_pt = true;
    for (const Point& p : poly.points) {
      if (!first_pt) out += ',';
      first_pt = false;
      out += '[';
      detail::append_g9(out, p.x);
      out += ',';
      detail::append_g9(out, p.y);
      out += ']';
    }
    out += "]}";
  }
  out += "\n]}\n";
  return out;
}

// One path element per polyline, world coordinates mapped into a pixel
// viewport with y pointing down.
inline std::string polylines_to_svg(const std::vector<LabeledPolyline>& polylines,
                                    const ViewRect& view, int px_width, int px_height) {
  const double sx = px_width / view.width();
  const double sy = px_height / view.height();
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " +
      std::to_string(px_width) + " " + std::to_string(px_height) + "\">\n";
  for (const LabeledPolyline& poly : polylines) {
    const Rgb c = hash_color(poly.id_a ^ detail::mix64(poly.id_b));
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", c.r, c.g, c.b);
    out += "<path fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1\" d=\"";
    for (std::size_t k = 0; k < poly.points.size(); ++k) {
      out += k == 0 ? "M " : " L ";
      detail::append_g9(out, (poly.points[k].x - view.x0) * sx);
      out += ' ';
      detail::append_g9(out, (view.y1 - poly.points[k].y) * sy);
    }
    if (poly.closed) out += " Z";
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace bandpat
