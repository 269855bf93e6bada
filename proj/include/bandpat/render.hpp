#pragma once

// Id-map rendering and the id-driven pattern effects: stable per-band colors,
// tearing by birth level, band thinning, and weaving of two band sets.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bandpat/band.hpp"
#include "bandpat/raster.hpp"

namespace bandpat {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// Row-major 8-bit RGB image; row 0 is the top (highest world y).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  Rgb& at(int i, int j) { return pixels[static_cast<std::size_t>(j) * width + i]; }
  const Rgb& at(int i, int j) const { return pixels[static_cast<std::size_t>(j) * width + i]; }
};

enum class ColorStyle { HashColor, Grayscale, BorderShade };

inline constexpr Rgb kInvalidColor{255, 0, 255};
inline constexpr Rgb kBackgroundColor{24, 24, 28};

namespace detail {

inline Rgb hsv_to_rgb(double hue, double sat, double val) {
  const double c = val * sat;
  const double hh = hue / 60.0;
  const double xm = c * (1.0 - std::abs(std::fmod(hh, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hh < 1) r = c, g = xm;
  else if (hh < 2) r = xm, g = c;
  else if (hh < 3) g = c, b = xm;
  else if (hh < 4) g = xm, b = c;
  else if (hh < 5) r = xm, b = c;
  else r = c, b = xm;
  const double m = val - c;
  auto q = [&](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {q(r), q(g), q(b)};
}

}  // namespace detail

// Stable color per id: a pure function of the id alone.
inline Rgb hash_color(std::uint64_t id) {
  const std::uint64_t h = detail::mix64(id ^ 0x42616e6450617401ull);
  const double hue = double(h & 0xFFFF) / 65536.0 * 360.0;
  const double sat = 0.45 + double((h >> 16) & 0xFF) / 255.0 * 0.35;
  const double val = 0.70 + double((h >> 24) & 0xFF) / 255.0 * 0.30;
  return detail::hsv_to_rgb(hue, sat, val);
}

inline std::uint8_t hash_gray(std::uint64_t id) {
  const std::uint64_t h = detail::mix64(id ^ 0x42616e6450617402ull);
  return static_cast<std::uint8_t>(48 + (h >> 32) % 192);
}

// Shade factor near band edges: 1 in the band interior, dipping to 0.5 on the
// outer 10% of either side.
inline double border_shade_factor(double local_coord) {
  const double edge = std::max(0.0, std::abs(local_coord - 0.5) * 2.0 - 0.8) / 0.2;
  return 1.0 - 0.5 * edge;
}

inline Image colorize(const IdMap& map, ColorStyle style) {
  Image img;
  img.width = map.width;
  img.height = map.height;
  img.pixels.resize(static_cast<std::size_t>(map.width) * map.height);
  for (int j = 0; j < map.height; ++j) {
    for (int i = 0; i < map.width; ++i) {
      const IdCell& cell = map.at(i, j);
      Rgb color;
      if (!cell.valid()) {
        color = kInvalidColor;
      } else {
        switch (style) {
          case ColorStyle::HashColor:
            color = hash_color(cell.id);
            break;
          case ColorStyle::Grayscale: {
            const std::uint8_t g = hash_gray(cell.id);
            color = {g, g, g};
            break;
          }
          case ColorStyle::BorderShade: {
            const Rgb base = hash_color(cell.id);
            const double f = border_shade_factor(cell.local_coord);
            color = {static_cast<std::uint8_t>(std::lround(base.r * f)),
                     static_cast<std::uint8_t>(std::lround(base.g * f)),
                     static_cast<std::uint8_t>(std::lround(base.b * f))};
            break;
          }
        }
      }
      img.at(i, map.height - 1 - j) = color;  // row 0 of the image is the top
    }
  }
  return img;
}

// Keep a band when it was already deployed at the cutoff level, i.e. every
// path bit below the cutoff's position is zero.
inline bool tear_keep_id(std::uint64_t id, int cutoff_level, const BandConfig& cfg) {
  if (cutoff_level < cfg.top_level || cutoff_level > cfg.top_level + cfg.depth)
    throw std::out_of_range("tear cutoff outside [top_level, top_level+depth]");
  const int below = cfg.depth - (cutoff_level - cfg.top_level);
  const std::uint64_t mask = (std::uint64_t(1) << below) - 1;
  return (id & mask) == 0;
}

inline bool tear_keep(const BandSample& sample, int cutoff_level, const BandConfig& cfg) {
  return tear_keep_id(sample.id, cutoff_level, cfg);
}

enum class WeaveSide { A, B };

// Front band at a crossing, decided by the id pair alone: an even popcount of
// the id difference puts the smaller id in front, an odd one the larger.
// Swapping the arguments flips the returned label but names the same band.
inline WeaveSide weave_front_ids(std::uint64_t a, std::uint64_t b) {
  const bool front_is_min = std::popcount(a ^ b) % 2 == 0;
  const std::uint64_t front = front_is_min ? std::min(a, b) : std::max(a, b);
  return front == a ? WeaveSide::A : WeaveSide::B;
}

inline WeaveSide weave_front(const BandSample& a, const BandSample& b) {
  return weave_front_ids(a.id, b.id);
}

// True inside the central 2*half_width_fraction of the band.
inline bool thin_band(double local_coord, double half_width_fraction) {
  if (!(half_width_fraction > 0.0 && half_width_fraction <= 0.5))
    throw std::invalid_argument("half width fraction must lie in (0, 0.5]");
  return std::abs(local_coord - 0.5) < half_width_fraction;
}

inline bool thin_band(const BandSample& sample, double half_width_fraction) {
  return thin_band(sample.local_coord, half_width_fraction);
}

inline Image render_tear(const IdMap& map, int cutoff_level, const BandConfig& cfg) {
  Image img = colorize(map, ColorStyle::BorderShade);
  for (int j = 0; j < map.height; ++j)
    for (int i = 0; i < map.width; ++i) {
      const IdCell& cell = map.at(i, j);
      if (cell.valid() && !tear_keep_id(cell.id, cutoff_level, cfg))
        img.at(i, map.height - 1 - j) = kBackgroundColor;
    }
  return img;
}

// Two thinned band sets over a background; at crossings the id parity picks
// the visible set.
inline Image render_weave(const IdMap& map_a, const IdMap& map_b, double half_width_fraction) {
  if (map_a.width != map_b.width || map_a.height != map_b.height)
    throw std::invalid_argument("weave maps must have matching dimensions");
  Image img;
  img.width = map_a.width;
  img.height = map_a.height;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int j = 0; j < img.height; ++j)
    for (int i = 0; i < img.width; ++i) {
      const IdCell& a = map_a.at(i, j);
      const IdCell& b = map_b.at(i, j);
      Rgb color = kBackgroundColor;
      if (!a.valid() || !b.valid()) {
        color = kInvalidColor;
      } else {
        const bool cover_a = thin_band(a.local_coord, half_width_fraction);
        const bool cover_b = thin_band(b.local_coord, half_width_fraction);
        if (cover_a && cover_b)
          color = weave_front_ids(a.id, b.id) == WeaveSide::A ? hash_color(a.id) : hash_color(b.id);
        else if (cover_a)
          color = hash_color(a.id);
        else if (cover_b)
          color = hash_color(b.id);
      }
      img.at(i, img.height - 1 - j) = color;
    }
  return img;
}

inline Image render_weave(const Scene& scene, int width, int height,
                          double half_width_fraction, int threads = 0) {
  if (!scene.secondary) throw std::invalid_argument("weave requires a second band set");
  const IdMap map_a = rasterize_set(scene, scene.primary, width, height, threads);
  const IdMap map_b = rasterize_set(scene, *scene.secondary, width, height, threads);
  return render_weave(map_a, map_b, half_width_fraction);
}

}  // namespace bandpat
