#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "bandpat/extract.hpp"
#include "helpers.hpp"

using namespace bandpat;
using testutil::make_config;
using Catch::Approx;

namespace {

IdMap manual_map(int w, int h, const std::vector<std::uint64_t>& ids) {
  IdMap map;
  map.width = w;
  map.height = h;
  map.view = {0, 0, double(w), double(h)};  // unit cells
  map.cells.resize(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    map.cells[k].id = ids[k];
    map.cells[k].flags = kCellValid;
    map.cells[k].local_coord = 0.5;
  }
  return map;
}

Scene expr_scene(const char* u, double d_const, BandConfig cfg, ViewRect view) {
  Scene scene;
  scene.primary.u.program = parse_expression(u);
  scene.primary.d.constant = d_const;
  scene.primary.config = std::move(cfg);
  scene.view = view;
  return scene;
}

// number of unit lattice segments along an axis-aligned polyline
std::size_t unit_segments(const LabeledPolyline& poly, const IdMap& map) {
  const double dx = map.view.width() / map.width;
  const double dy = map.view.height() / map.height;
  double total = 0;
  const std::size_t n = poly.points.size();
  const std::size_t pairs = poly.closed ? n : n - 1;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point& a = poly.points[k];
    const Point& b = poly.points[(k + 1) % n];
    total += std::abs(b.x - a.x) / dx + std::abs(b.y - a.y) / dy;
  }
  return static_cast<std::size_t>(std::llround(total));
}

std::size_t differing_edges(const IdMap& map) {
  std::size_t count = 0;
  for (int j = 0; j < map.height; ++j)
    for (int i = 0; i < map.width; ++i) {
      if (i + 1 < map.width && map.at(i, j).valid() && map.at(i + 1, j).valid() &&
          map.at(i, j).id != map.at(i + 1, j).id)
        ++count;
      if (j + 1 < map.height && map.at(i, j).valid() && map.at(i, j + 1).valid() &&
          map.at(i, j).id != map.at(i, j + 1).id)
        ++count;
    }
  return count;
}

}  // namespace

TEST_CASE("two-column map yields one straight border") {
  const IdMap map = manual_map(2, 2, {1, 2, 1, 2});
  const auto polys = extract_borders(map);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].id_a == 1);
  CHECK(polys[0].id_b == 2);
  CHECK_FALSE(polys[0].closed);
  REQUIRE(polys[0].points.size() == 2);  // collinear run merged
  CHECK(polys[0].points[0].x == Approx(1.0));
  CHECK(polys[0].points[1].x == Approx(1.0));
  CHECK(std::abs(polys[0].points[1].y - polys[0].points[0].y) == Approx(2.0));
}

TEST_CASE("uniform map has no borders") {
  CHECK(extract_borders(manual_map(3, 3, std::vector<std::uint64_t>(9, 7))).empty());
}

TEST_CASE("single distinct cell yields a closed ring") {
  std::vector<std::uint64_t> ids(9, 1);
  ids[4] = 2;
  const IdMap map = manual_map(3, 3, ids);
  const auto polys = extract_borders(map);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].closed);
  CHECK(polys[0].id_a == 1);
  CHECK(polys[0].id_b == 2);
  CHECK(polys[0].points.size() == 4);  // the four ring corners
  CHECK(unit_segments(polys[0], map) == 4);
}

TEST_CASE("saddle corners pair deterministically and conserve segments") {
  // checkerboard: every interior corner is a two-id saddle
  std::vector<std::uint64_t> ids;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) ids.push_back((i + j) % 2 == 0 ? 5 : 9);
  const IdMap map = manual_map(4, 4, ids);
  const auto polys = extract_borders(map);
  std::size_t total = 0;
  for (const auto& poly : polys) {
    CHECK(poly.id_a == 5);
    CHECK(poly.id_b == 9);
    total += unit_segments(poly, map);
  }
  CHECK(total == differing_edges(map));
}

TEST_CASE("border extraction on a radial scene") {
  Scene scene = expr_scene("hypot(x,y)", 0.0, make_config(2, 1, ShiftMode::Halves, 10),
                           {-1, -1, 1, 1});
  scene.primary.d.kind = DensitySpec::Kind::Expr;
  scene.primary.d.program = parse_expression("2+2*hypot(x,y)");
  const IdMap map = rasterize(scene, 128, 128, 1);
  const auto polys = extract_borders(map);
  REQUIRE(!polys.empty());

  SECTION("segment conservation") {
    std::size_t total = 0;
    for (const auto& poly : polys) total += unit_segments(poly, map);
    CHECK(total == differing_edges(map));
  }

  SECTION("open ends sit on the boundary or at a junction") {
    // recompute junction corners: >= 3 distinct ids around the corner
    auto is_junction = [&](int ci, int cj) {
      std::set<std::uint64_t> ids;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int i = ci + di, j = cj + dj;
          if (i < 0 || j < 0 || i >= map.width || j >= map.height) continue;
          ids.insert(map.at(i, j).id);
        }
      return ids.size() >= 3;
    };
    const double dx = map.view.width() / map.width;
    const double dy = map.view.height() / map.height;
    for (const auto& poly : polys) {
      if (poly.closed) continue;
      for (const Point& end : {poly.points.front(), poly.points.back()}) {
        const int ci = static_cast<int>(std::llround((end.x - map.view.x0) / dx));
        const int cj = static_cast<int>(std::llround((end.y - map.view.y0) / dy));
        const bool boundary = ci == 0 || cj == 0 || ci == map.width || cj == map.height;
        REQUIRE((boundary || is_junction(ci, cj)));
      }
    }
  }

  SECTION("labels match the cells on either side of segment midpoints") {
    std::mt19937_64 rng(7);
    const double dx = map.view.width() / map.width;
    const double dy = map.view.height() / map.height;
    for (int trial = 0; trial < 100; ++trial) {
      const auto& poly = polys[rng() % polys.size()];
      const std::size_t n = poly.points.size();
      const std::size_t k = rng() % (poly.closed ? n : n - 1);
      const Point& a = poly.points[k];
      const Point& b = poly.points[(k + 1) % n];
      const Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      std::uint64_t left, right;
      if (a.x == b.x) {  // vertical span: cells to either side in x
        const int ci = static_cast<int>(std::llround((mid.x - map.view.x0) / dx));
        const int cj = static_cast<int>(std::floor((mid.y - map.view.y0) / dy));
        left = map.at(ci - 1, cj).id;
        right = map.at(ci, cj).id;
      } else {
        const int ci = static_cast<int>(std::floor((mid.x - map.view.x0) / dx));
        const int cj = static_cast<int>(std::llround((mid.y - map.view.y0) / dy));
        left = map.at(ci, cj - 1).id;
        right = map.at(ci, cj).id;
      }
      REQUIRE(std::min(left, right) == poly.id_a);
      REQUIRE(std::max(left, right) == poly.id_b);
    }
  }
}

TEST_CASE("centerlines of an exact-density linear scene") {
  const Scene scene =
      expr_scene("x", 2.0, make_config(2, 1, ShiftMode::Explicit, 8), {0, 0, 1, 1});
  const auto polys = extract_centerlines(scene, 64, 64, 1);
  REQUIRE(polys.size() == 2);
  std::vector<double> xs;
  for (const auto& poly : polys) {
    CHECK(poly.id_a == poly.id_b);
    double min_y = 1e30, max_y = -1e30;
    for (const Point& p : poly.points) {
      CHECK(p.x == Approx(poly.points[0].x).margin(1e-9));  // vertical line
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    CHECK(max_y - min_y >= 1.0 - 2.0 / 64.0);  // spans the view
    xs.push_back(poly.points[0].x);
  }
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == Approx(0.25).margin(1e-9));
  CHECK(xs[1] == Approx(0.75).margin(1e-9));
}

TEST_CASE("just-appeared bands grow no centerlines") {
  // d = 3: the level-2 bands born at level 2 are still opening
  const Scene scene =
      expr_scene("x", 3.0, make_config(2, 1, ShiftMode::Halves, 8), {0, 0, 1, 1});
  const IdMap map = rasterize(scene, 64, 64, 1);
  std::set<std::uint64_t> appearing;
  for (const IdCell& cell : map.cells)
    if (cell.valid() && cell.just_appeared()) appearing.insert(cell.id);
  REQUIRE(!appearing.empty());
  for (const auto& poly : extract_centerlines(map))
    CHECK_FALSE(appearing.count(poly.id_a));
}

TEST_CASE("radial centerlines form rings at the band middles") {
  const Scene scene =
      expr_scene("hypot(x,y)", 3.0, make_config(2, 1, ShiftMode::Halves, 8), {-1, -1, 1, 1});
  const IdMap map = rasterize(scene, 256, 256, 1);
  const auto polys = extract_centerlines(map);
  REQUIRE(!polys.empty());
  int rings = 0;
  const LookupContext ctx(scene.primary.config);
  for (const auto& poly : polys) {
    if (poly.closed) ++rings;
    REQUIRE(!poly.points.empty());
    for (const Point& p : poly.points) {
      const BandSample s = band_lookup(std::hypot(p.x, p.y), 3.0, ctx);
      REQUIRE(s.local_coord == Approx(0.5).margin(0.05));
      REQUIRE(s.id == poly.id_a);
    }
  }
  CHECK(rings > 0);
}

TEST_CASE("centerline spacing is even for linear u and exact density") {
  const Scene scene =
      expr_scene("x", 4.0, make_config(2, 1, ShiftMode::Halves, 8), {0, 0, 1, 1});
  const auto polys = extract_centerlines(scene, 256, 256, 1);
  std::vector<double> xs;
  for (const auto& poly : polys) xs.push_back(poly.points[0].x);
  std::sort(xs.begin(), xs.end());
  REQUIRE(xs.size() >= 3);
  for (std::size_t k = 1; k < xs.size(); ++k)
    CHECK(xs[k] - xs[k - 1] == Approx(0.25).margin(1.0 / 256.0));
}

TEST_CASE("polyline simplification") {
  LabeledPolyline poly;
  poly.id_a = poly.id_b = 1;
  poly.points = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};

  SECTION("collinear run collapses to the endpoints") {
    const auto simple = simplify_polyline(poly, 1e-6);
    REQUIRE(simple.points.size() == 2);
    CHECK(simple.points.front() == Point{0, 0});
    CHECK(simple.points.back() == Point{4, 0});
  }
  SECTION("zero tolerance is the identity") {
    const auto same = simplify_polyline(poly, 0.0);
    CHECK(same.points == poly.points);
  }
  SECTION("corners above the tolerance survive") {
    LabeledPolyline corner;
    corner.points = {{0, 0}, {1, 1}, {2, 0}};
    const auto kept = simplify_polyline(corner, 0.5);
    REQUIRE(kept.points.size() == 3);
    const auto collapsed = simplify_polyline(corner, 1.5);
    REQUIRE(collapsed.points.size() == 2);
  }
  SECTION("closed rings keep the flag and stay within tolerance") {
    LabeledPolyline ring;
    ring.closed = true;
    for (int k = 0; k < 100; ++k) {
      const double a = 2.0 * 3.14159265358979 * k / 100.0;
      ring.points.push_back({std::cos(a), std::sin(a)});
    }
    const auto simple = simplify_polyline(ring, 0.05);
    CHECK(simple.closed);
    CHECK(simple.points.size() >= 4);
    CHECK(simple.points.size() < 40);
  }
}

TEST_CASE("midpoint smoothing keeps endpoints and shrinks corners") {
  LabeledPolyline poly;
  poly.points = {{0, 0}, {1, 0}, {1, 1}};
  const auto smooth = smooth_polyline(poly, 2);
  REQUIRE(smooth.points.size() == 3);
  CHECK(smooth.points.front() == Point{0, 0});
  CHECK(smooth.points.back() == Point{1, 1});
  CHECK(smooth.points[1].x < 1.0);
  CHECK(smooth.points[1].y > 0.0);
}
