#pragma once

// Labeled trajectory extraction from an id map: border curves between bands
// (exact cell-edge contours, like outlining regions of a label image) and
// center lines of fully deployed bands (marching squares on the local
// coordinate).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bandpat/raster.hpp"

namespace bandpat {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct LabeledPolyline {
  std::uint64_t id_a = 0;  // bands on either side, id_a <= id_b;
  std::uint64_t id_b = 0;  // equal ids for center lines
  std::vector<Point> points;
  bool closed = false;
};

namespace detail {

// Border segments live on the cell-corner lattice; nodes are corner indices.
struct BorderSegment {
  int ax, ay, bx, by;  // corner coordinates, a -> b in creation order
  std::uint64_t lo, hi;
};

enum class Dir { Up, Down, Left, Right, None };

inline Dir dir_between(int ax, int ay, int bx, int by) {
  if (bx == ax && by == ay - 1) return Dir::Up;
  if (bx == ax && by == ay + 1) return Dir::Down;
  if (bx == ax - 1 && by == ay) return Dir::Left;
  if (bx == ax + 1 && by == ay) return Dir::Right;
  return Dir::None;
}

// Fixed pairing for saddle corners (four segments, two ids): up joins right,
// down joins left.
inline Dir saddle_partner(Dir d) {
  switch (d) {
    case Dir::Up: return Dir::Right;
    case Dir::Right: return Dir::Up;
    case Dir::Down: return Dir::Left;
    case Dir::Left: return Dir::Down;
    default: return Dir::None;
  }
}

}  // namespace detail

// Extracts the border curve network. Every edge between 4-neighbor cells with
// different ids contributes one unit segment along the shared cell boundary;
// segments with the same id pair chain into maximal polylines. Chains stop at
// corners where three or more distinct ids meet, so the label pair is constant
// along each polyline. Vertices sit on the cell-corner lattice in world
// coordinates; collinear runs are merged.
inline std::vector<LabeledPolyline> extract_borders(const IdMap& map) {
  const int w = map.width;
  const int h = map.height;
  const std::uint64_t invalid_id = ~std::uint64_t(0);

  auto cell_id = [&](int i, int j) {
    const IdCell& c = map.at(i, j);
    return c.valid() ? c.id : invalid_id;
  };

  std::vector<detail::BorderSegment> segments;
  const auto node_key = [w](int i, int j) {
    return static_cast<std::uint64_t>(j) * (w + 1) + static_cast<std::uint64_t>(i);
  };
  std::unordered_map<std::uint64_t, std::vector<int>> incident;

  auto add_segment = [&](int ax, int ay, int bx, int by, std::uint64_t id1, std::uint64_t id2) {
    if (id1 == invalid_id || id2 == invalid_id) return;
    detail::BorderSegment s{ax, ay, bx, by, std::min(id1, id2), std::max(id1, id2)};
    incident[node_key(ax, ay)].push_back(static_cast<int>(segments.size()));
    incident[node_key(bx, by)].push_back(static_cast<int>(segments.size()));
    segments.push_back(s);
  };

  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (i + 1 < w && cell_id(i, j) != cell_id(i + 1, j))
        add_segment(i + 1, j, i + 1, j + 1, cell_id(i, j), cell_id(i + 1, j));
      if (j + 1 < h && cell_id(i, j) != cell_id(i, j + 1))
        add_segment(i, j + 1, i + 1, j + 1, cell_id(i, j), cell_id(i, j + 1));
    }
  }

  // Distinct ids meeting at a corner (invalid regions count as one id).
  auto distinct_ids_at = [&](int i, int j) {
    std::uint64_t ids[4];
    int n = 0;
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        const int ci = i + di, cj = j + dj;
        if (ci < 0 || cj < 0 || ci >= w || cj >= h) continue;
        const std::uint64_t id = cell_id(ci, cj);
        bool seen = false;
        for (int k = 0; k < n; ++k) seen = seen || ids[k] == id;
        if (!seen) ids[n++] = id;
      }
    return n;
  };

  std::vector<char> used(segments.size(), 0);
  std::vector<LabeledPolyline> out;

  // Continuation of a chain arriving at corner (i, j) through segment `via`.
  auto continuation = [&](int i, int j, int via) -> int {
    if (distinct_ids_at(i, j) >= 3) return -1;  // junction: chains terminate
    const auto it = incident.find(node_key(i, j));
    const auto& inc = it->second;
    if (inc.size() == 2) return inc[0] == via ? inc[1] : inc[0];
    if (inc.size() == 4) {
      const detail::BorderSegment& vs = segments[static_cast<std::size_t>(via)];
      const int ox = vs.ax == i && vs.ay == j ? vs.bx : vs.ax;
      const int oy = vs.ax == i && vs.ay == j ? vs.by : vs.ay;
      const detail::Dir want = detail::saddle_partner(detail::dir_between(i, j, ox, oy));
      for (int cand : inc) {
        if (cand == via) continue;
        const detail::BorderSegment& cs = segments[static_cast<std::size_t>(cand)];
        const int cx = cs.ax == i && cs.ay == j ? cs.bx : cs.ax;
        const int cy = cs.ax == i && cs.ay == j ? cs.by : cs.ay;
        if (detail::dir_between(i, j, cx, cy) == want) return cand;
      }
      return -1;
    }
    return -1;  // dead end (map boundary next to the segment)
  };

  struct Node {
    int x, y;
  };

  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = 1;
    const detail::BorderSegment& s0 = segments[start];
    std::vector<Node> path{{s0.ax, s0.ay}, {s0.bx, s0.by}};
    bool closed = false;

    // forward from the b end, then backward from the a end
    for (int pass = 0; pass < 2 && !closed; ++pass) {
      int cur = static_cast<int>(start);
      for (;;) {
        const Node tip = pass == 0 ? path.back() : path.front();
        const int next = continuation(tip.x, tip.y, cur);
        if (next < 0) break;
        if (next == static_cast<int>(start)) {
          closed = true;
          break;
        }
        if (used[next]) break;  // defensive: shared junctions are already cut
        used[next] = 1;
        const detail::BorderSegment& ns = segments[static_cast<std::size_t>(next)];
        const Node other = ns.ax == tip.x && ns.ay == tip.y ? Node{ns.bx, ns.by} : Node{ns.ax, ns.ay};
        if (pass == 0)
          path.push_back(other);
        else
          path.insert(path.begin(), other);
        cur = next;
      }
    }

    // merge collinear runs (lattice-exact)
    std::vector<Node> merged;
    auto collinear = [](const Node& a, const Node& b, const Node& c) {
      return (a.x == b.x && b.x == c.x) || (a.y == b.y && b.y == c.y);
    };
    for (const Node& n : path) {
      if (merged.size() >= 2 && collinear(merged[merged.size() - 2], merged.back(), n))
        merged.back() = n;
      else
        merged.push_back(n);
    }
    if (closed) {
      // the walk revisits the start node; drop the duplicate and fix the seam
      if (merged.size() > 1 && merged.front().x == merged.back().x &&
          merged.front().y == merged.back().y)
        merged.pop_back();
      while (merged.size() >= 3 && collinear(merged.back(), merged.front(), merged[1]))
        merged.erase(merged.begin());
      while (merged.size() >= 3 &&
             collinear(merged[merged.size() - 2], merged.back(), merged.front()))
        merged.pop_back();
    }

    LabeledPolyline poly;
    poly.id_a = s0.lo;
    poly.id_b = s0.hi;
    poly.closed = closed;
    poly.points.reserve(merged.size());
    for (const Node& n : merged) poly.points.push_back({map.corner_x(n.x), map.corner_y(n.y)});
    out.push_back(std::move(poly));
  }
  return out;
}

namespace detail {

struct IsoSegment {
  std::uint64_t edge_a, edge_b;  // edge keys
  Point pa, pb;
  std::uint64_t band;
};

}  // namespace detail

// Center lines of fully deployed bands: isolines of local_coord - 0.5
// restricted to cell squares whose four corners share one id with none just
// appeared. Linear interpolation along square edges; output labeled with the
// band id on both sides.
inline std::vector<LabeledPolyline> extract_centerlines(const IdMap& map) {
  const int w = map.width;
  const int h = map.height;
  std::vector<detail::IsoSegment> segments;

  // key of the edge between cell centers (i,j) and either (i+1,j) [orient 0]
  // or (i,j+1) [orient 1]
  auto edge_key = [w](int i, int j, int orient) {
    return (static_cast<std::uint64_t>(j) * (w + 1) + static_cast<std::uint64_t>(i)) * 2 +
           static_cast<std::uint64_t>(orient);
  };

  auto g = [&](int i, int j) { return map.at(i, j).local_coord - 0.5; };

  for (int j = 0; j + 1 < h; ++j) {
    for (int i = 0; i + 1 < w; ++i) {
      const IdCell& c00 = map.at(i, j);
      const IdCell& c10 = map.at(i + 1, j);
      const IdCell& c01 = map.at(i, j + 1);
      const IdCell& c11 = map.at(i + 1, j + 1);
      if (!c00.valid() || !c10.valid() || !c01.valid() || !c11.valid()) continue;
      if (c00.id != c10.id || c00.id != c01.id || c00.id != c11.id) continue;
      if (c00.just_appeared() || c10.just_appeared() || c01.just_appeared() ||
          c11.just_appeared())
        continue;

      const double g00 = g(i, j), g10 = g(i + 1, j), g01 = g(i, j + 1), g11 = g(i + 1, j + 1);
      const int idx = (g00 < 0 ? 1 : 0) | (g10 < 0 ? 2 : 0) | (g11 < 0 ? 4 : 0) |
                      (g01 < 0 ? 8 : 0);
      if (idx == 0 || idx == 15) continue;

      // crossing point on the edge between two cell centers
      auto cross = [&](int ia, int ja, double ga, int ib, int jb, double gb) {
        const double s = ga / (ga - gb);
        return Point{map.cell_x(ia) + s * (map.cell_x(ib) - map.cell_x(ia)),
                     map.cell_y(ja) + s * (map.cell_y(jb) - map.cell_y(ja))};
      };
      const std::uint64_t bottom = edge_key(i, j, 0);
      const std::uint64_t right = edge_key(i + 1, j, 1);
      const std::uint64_t top = edge_key(i, j + 1, 0);
      const std::uint64_t left = edge_key(i, j, 1);
      const Point p_bottom = cross(i, j, g00, i + 1, j, g10);
      const Point p_right = cross(i + 1, j, g10, i + 1, j + 1, g11);
      const Point p_top = cross(i, j + 1, g01, i + 1, j + 1, g11);
      const Point p_left = cross(i, j, g00, i, j + 1, g01);

      auto emit = [&](std::uint64_t ea, Point pa, std::uint64_t eb, Point pb) {
        if (pa == pb) return;  // isoline grazing a sample point
        segments.push_back({ea, eb, pa, pb, c00.id});
      };

      switch (idx) {
        case 1: emit(left, p_left, bottom, p_bottom); break;
        case 2: emit(bottom, p_bottom, right, p_right); break;
        case 3: emit(left, p_left, right, p_right); break;
        case 4: emit(right, p_right, top, p_top); break;
        case 5: {  // saddle: resolve with the center average
          const bool center_neg = (g00 + g10 + g01 + g11) * 0.25 < 0;
          if (center_neg) {
            emit(bottom, p_bottom, right, p_right);
            emit(left, p_left, top, p_top);
          } else {
            emit(left, p_left, bottom, p_bottom);
            emit(right, p_right, top, p_top);
          }
          break;
        }
        case 6: emit(bottom, p_bottom, top, p_top); break;
        case 7: emit(left, p_left, top, p_top); break;
        case 8: emit(top, p_top, left, p_left); break;
        case 9: emit(bottom, p_bottom, top, p_top); break;
        case 10: {  // opposite saddle
          const bool center_neg = (g00 + g10 + g01 + g11) * 0.25 < 0;
          if (center_neg) {
            emit(left, p_left, bottom, p_bottom);
            emit(right, p_right, top, p_top);
          } else {
            emit(bottom, p_bottom, right, p_right);
            emit(left, p_left, top, p_top);
          }
          break;
        }
        case 11: emit(right, p_right, top, p_top); break;
        case 12: emit(right, p_right, left, p_left); break;
        case 13: emit(bottom, p_bottom, right, p_right); break;
        case 14: emit(left, p_left, bottom, p_bottom); break;
        default: break;
      }
    }
  }

  // chain by shared edge keys; each key joins at most two segments
  std::unordered_map<std::uint64_t, std::vector<int>> by_edge;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    by_edge[segments[k].edge_a].push_back(static_cast<int>(k));
    by_edge[segments[k].edge_b].push_back(static_cast<int>(k));
  }

  std::vector<char> used(segments.size(), 0);
  std::vector<LabeledPolyline> out;
  auto next_at = [&](std::uint64_t edge, int via) -> int {
    const auto it = by_edge.find(edge);
    if (it == by_edge.end() || it->second.size() != 2) return -1;
    const int other = it->second[0] == via ? it->second[1] : it->second[0];
    return segments[static_cast<std::size_t>(other)].band ==
                   segments[static_cast<std::size_t>(via)].band
               ? other
               : -1;
  };

  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = 1;
    std::vector<Point> pts{segments[start].pa, segments[start].pb};
    std::uint64_t front_edge = segments[start].edge_a;
    std::uint64_t back_edge = segments[start].edge_b;
    bool closed = false;

    for (int pass = 0; pass < 2 && !closed; ++pass) {
      int cur = static_cast<int>(start);
      std::uint64_t tip = pass == 0 ? back_edge : front_edge;
      for (;;) {
        const int next = next_at(tip, cur);
        if (next < 0) break;
        if (next == static_cast<int>(start)) {
          closed = true;
          break;
        }
        if (used[next]) break;
        used[next] = 1;
        const detail::IsoSegment& ns = segments[static_cast<std::size_t>(next)];
        const bool forward_match = ns.edge_a == tip;
        const Point p = forward_match ? ns.pb : ns.pa;
        tip = forward_match ? ns.edge_b : ns.edge_a;
        if (pass == 0) {
          if (!(pts.back() == p)) pts.push_back(p);
        } else {
          if (!(pts.front() == p)) pts.insert(pts.begin(), p);
        }
        cur = next;
      }
      if (pass == 0)
        back_edge = tip;
      else
        front_edge = tip;
    }

    if (closed && pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
    if (pts.size() < 2) continue;
    LabeledPolyline poly;
    poly.id_a = poly.id_b = segments[start].band;
    poly.points = std::move(pts);
    poly.closed = closed;
    out.push_back(std::move(poly));
  }
  return out;
}

inline std::vector<LabeledPolyline> extract_centerlines(const Scene& scene, int width,
                                                        int height, int threads = 0) {
  return extract_centerlines(rasterize(scene, width, height, threads));
}

namespace detail {

inline double line_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  return std::abs(dy * (p.x - a.x) - dx * (p.y - a.y)) / len;
}

inline void douglas_peucker(const std::vector<Point>& pts, std::size_t lo, std::size_t hi,
                            double tol, std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  std::size_t split = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double dist = line_distance(pts[k], pts[lo], pts[hi]);
    if (dist > worst) {
      worst = dist;
      split = k;
    }
  }
  if (worst > tol) {
    keep[split] = 1;
    douglas_peucker(pts, lo, split, tol, keep);
    douglas_peucker(pts, split, hi, tol, keep);
  }
}

}  // namespace detail

// Douglas-Peucker simplification; endpoints and the closed flag are
// preserved, maximum deviation from the input stays within the tolerance.
// A zero tolerance returns the input unchanged.
inline LabeledPolyline simplify_polyline(const LabeledPolyline& poly, double tolerance) {
  if (tolerance < 0.0) throw std::invalid_argument("simplification tolerance must be >= 0");
  if (tolerance == 0.0 || poly.points.size() <= 2) return poly;

  LabeledPolyline out;
  out.id_a = poly.id_a;
  out.id_b = poly.id_b;
  out.closed = poly.closed;

  if (!poly.closed) {
    const std::size_t n = poly.points.size();
    std::vector<char> keep(n, 0);
    keep.front() = keep.back() = 1;
    detail::douglas_peucker(poly.points, 0, n - 1, tolerance, keep);
    for (std::size_t k = 0; k < n; ++k)
      if (keep[k]) out.points.push_back(poly.points[k]);
    return out;
  }

  // closed ring: anchor at the point farthest from the first vertex
  std::vector<Point> ring = poly.points;
  ring.push_back(ring.front());
  const std::size_t n = ring.size();
  std::size_t far = 1;
  double far_dist = -1.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double dist = std::hypot(ring[k].x - ring[0].x, ring[k].y - ring[0].y);
    if (dist > far_dist) {
      far_dist = dist;
      far = k;
    }
  }
  std::vector<char> keep(n, 0);
  keep[0] = keep[far] = keep[n - 1] = 1;
  detail::douglas_peucker(ring, 0, far, tolerance, keep);
  detail::douglas_peucker(ring, far, n - 1, tolerance, keep);
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (keep[k]) out.points.push_back(ring[k]);
  return out;
}

// Midpoint smoothing for print trajectories: each pass averages every vertex
// with its neighbors (endpoints stay put on open polylines).
inline LabeledPolyline smooth_polyline(const LabeledPolyline& poly, int iterations) {
  LabeledPolyline out = poly;
  const std::size_t n = out.points.size();
  if (n < 3 || iterations <= 0) return out;
  std::vector<Point> next(n);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!out.closed && (k == 0 || k == n - 1)) {
        next[k] = out.points[k];
        continue;
      }
      const Point& prev = out.points[(k + n - 1) % n];
      const Point& cur = out.points[k];
      const Point& nxt = out.points[(k + 1) % n];
      next[k] = {0.25 * prev.x + 0.5 * cur.x + 0.25 * nxt.x,
                 0.25 * prev.y + 0.5 * cur.y + 0.25 * nxt.y};
    }
    out.points = next;
  }
  return out;
}

}  // namespace bandpat
