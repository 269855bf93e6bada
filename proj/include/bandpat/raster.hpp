#pragma once

// Evaluates the band lookup over a pixel grid. Cells are sampled at their
// centers; the result is a pure function of the scene, independent of thread
// count and evaluation order.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bandpat/band.hpp"
#include "bandpat/field.hpp"

namespace bandpat {

struct ViewRect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool operator==(const ViewRect&) const = default;
};

struct FieldSpec {
  enum class Kind { Expr, Image } kind = Kind::Expr;
  FieldProgram program;
  ImageField image;
  std::string image_path;  // as written in the scene config

  double eval(double x, double y, double t) const {
    return kind == Kind::Expr ? evaluate(program, x, y, t) : image.sample(x, y);
  }
};

struct DensitySpec {
  enum class Kind { Expr, Constant, Stretch } kind = Kind::Constant;
  FieldProgram program;
  double constant = 2.0;
  double stretch_spacing = 0.0;  // target band spacing in world units
};

struct BandSet {
  FieldSpec u;
  DensitySpec d;
  BandConfig config;
};

struct Scene {
  BandSet primary;
  std::optional<BandSet> secondary;  // for weaving
  ViewRect view;
  double time = 0.0;
};

enum CellFlags : std::uint8_t {
  kCellValid = 1,
  kCellJustAppeared = 2,
  kCellDensityClamped = 4,
};

struct IdCell {
  std::uint64_t id = 0;
  double local_coord = 0.0;
  double width_v = 0.0;
  std::int32_t level = 0;
  std::uint8_t flags = 0;

  bool valid() const { return flags & kCellValid; }
  bool just_appeared() const { return flags & kCellJustAppeared; }
  bool d_clamped() const { return flags & kCellDensityClamped; }
  bool operator==(const IdCell&) const = default;
};

struct IdMap {
  int width = 0;
  int height = 0;
  ViewRect view;
  std::vector<IdCell> cells;  // row-major, row 0 at view.y0
  std::size_t invalid_count = 0;
  std::size_t clamped_count = 0;

  const IdCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * width + i]; }
  IdCell& at(int i, int j) { return cells[static_cast<std::size_t>(j) * width + i]; }
  double cell_x(int i) const { return view.x0 + (i + 0.5) * view.width() / width; }
  double cell_y(int j) const { return view.y0 + (j + 0.5) * view.height() / height; }
  // Corner lattice (cell boundaries), used by curve extraction.
  double corner_x(int i) const { return view.x0 + i * view.width() / width; }
  double corner_y(int j) const { return view.y0 + j * view.height() / height; }
};

namespace detail {

inline IdCell invalid_cell() {
  IdCell cell;
  cell.id = ~std::uint64_t(0);
  cell.flags = 0;
  return cell;
}

inline IdCell evaluate_cell(const BandSet& set, const LookupContext& ctx, double x, double y,
                            double t, double grad_h) {
  const double u = set.u.eval(x, y, t);
  double d = 0.0;
  switch (set.d.kind) {
    case DensitySpec::Kind::Expr:
      d = evaluate(set.d.program, x, y, t);
      break;
    case DensitySpec::Kind::Constant:
      d = set.d.constant;
      break;
    case DensitySpec::Kind::Stretch:
      d = compensated_density_fd(
          [&](double px, double py, double pt) { return set.u.eval(px, py, pt); }, x, y, t,
          set.d.stretch_spacing, grad_h);
      break;
  }
  if (!std::isfinite(u) || std::isnan(d)) return invalid_cell();

  const BandSample s = band_lookup(u, d, ctx, DensityPolicy::Clamp);
  IdCell cell;
  cell.id = s.id;
  cell.local_coord = s.local_coord;
  cell.width_v = s.right_border - s.left_border;
  cell.level = s.level;
  cell.flags = kCellValid;
  if (s.just_appeared) cell.flags |= kCellJustAppeared;
  if (s.d_clamped) cell.flags |= kCellDensityClamped;
  return cell;
}

}  // namespace detail

// Rasterizes one band set. threads == 0 picks the hardware concurrency; the
// output is byte-identical for every thread count.
inline IdMap rasterize_set(const Scene& scene, const BandSet& set, int width, int height,
                           int threads = 0) {
  if (width < 1 || height < 1) throw std::invalid_argument("raster size must be at least 1x1");
  if (!(scene.view.width() > 0.0) || !(scene.view.height() > 0.0))
    throw std::invalid_argument("view rectangle is degenerate");

  const LookupContext ctx(set.config);
  IdMap map;
  map.width = width;
  map.height = height;
  map.view = scene.view;
  map.cells.resize(static_cast<std::size_t>(width) * height);

  const double grad_h = 1e-4 * scene.view.width();
  const double t = scene.time;

  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, height);

  auto run_rows = [&](int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
      const double y = map.cell_y(j);
      IdCell* row = &map.cells[static_cast<std::size_t>(j) * width];
      for (int i = 0; i < width; ++i)
        row[i] = detail::evaluate_cell(set, ctx, map.cell_x(i), y, t, grad_h);
    }
  };

  if (n == 1) {
    run_rows(0, height);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    const int chunk = (height + n - 1) / n;
    for (int k = 0; k < n; ++k)
      pool.emplace_back(run_rows, std::min(k * chunk, height), std::min((k + 1) * chunk, height));
    for (auto& th : pool) th.join();
  }

  for (const IdCell& cell : map.cells) {
    if (!cell.valid())
      ++map.invalid_count;
    else if (cell.d_clamped())
      ++map.clamped_count;
  }
  if (map.invalid_count * 2 > map.cells.size())
    throw std::runtime_error("field evaluation failed on more than half of the cells (" +
                             std::to_string(map.invalid_count) + " of " +
                             std::to_string(map.cells.size()) + ")");
  return map;
}

inline IdMap rasterize(const Scene& scene, int width, int height, int threads = 0) {
  return rasterize_set(scene, scene.primary, width, height, threads);
}

}  // namespace bandpat
