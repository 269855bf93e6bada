#pragma once

// Density-adaptive band lookup.
//
// A band set of level L tiles the parameter axis with spacing step^-L,
// step = N/M in (1, 2]. A lookup at (v, d) quantizes d to the two levels
// bracketing it, pulls the fine borders toward their nearest coarse border,
// and numbers the band containing v through the level hierarchy so that the
// id is stable across lookup densities.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bandpat {

enum class ShiftMode { Halves, Hashed, Explicit };
enum class Profile { Linear, Smoothstep };
enum class DensityPolicy { Clamp, Strict };

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// 53-bit mantissa scaled into [0, 1).
inline double to_unit(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

}  // namespace detail

struct BandConfig {
  std::int64_t step_num = 2;  // step = step_num/step_den, irreducible, in (1, 2]
  std::int64_t step_den = 1;
  int top_level = 0;
  int depth = 24;  // number of path-bit positions in the global id
  ShiftMode shift_mode = ShiftMode::Halves;
  std::uint64_t shift_seed = 0;
  std::vector<double> shift_values;  // Explicit: levels top_level+1 .. top_level+depth
  Profile profile = Profile::Linear;

  double step() const { return double(step_num) / double(step_den); }

  bool operator==(const BandConfig&) const = default;

  void validate() const {
    if (step_num < 1 || step_den < 1)
      throw std::invalid_argument("step numerator and denominator must be positive");
    if (std::gcd(step_num, step_den) != 1)
      throw std::invalid_argument("step must be an irreducible fraction");
    if (!(step_den < step_num && step_num <= 2 * step_den))
      throw std::invalid_argument("step must lie in (1,2]");
    if (depth < 1 || depth > 62)
      throw std::invalid_argument("depth must lie in [1,62]");
    if (shift_mode == ShiftMode::Explicit) {
      if (static_cast<int>(shift_values.size()) != depth)
        throw std::invalid_argument("explicit shifts must cover levels top_level+1 .. top_level+depth");
      for (double r : shift_values)
        if (!(r >= 0.0 && r < 1.0))
          throw std::invalid_argument("explicit shifts must lie in [0,1)");
    }
  }
};

// Spacing of the level-L band set: step^-L.
inline double level_spacing(int level, const BandConfig& cfg) {
  return std::pow(double(cfg.step_den) / double(cfg.step_num), level);
}

// Bands per unit at level L: step^L.
inline double level_density(int level, const BandConfig& cfg) {
  return std::pow(double(cfg.step_num) / double(cfg.step_den), level);
}

// Per-level lattice offset, in units of the level spacing.
inline double level_shift(int level, const BandConfig& cfg) {
  switch (cfg.shift_mode) {
    case ShiftMode::Halves:
      return 0.5;
    case ShiftMode::Hashed:
      return detail::to_unit(detail::mix64(
          cfg.shift_seed ^ detail::mix64(static_cast<std::uint64_t>(static_cast<std::int64_t>(level)))));
    case ShiftMode::Explicit:
      if (level == cfg.top_level) return 0.0;  // top lattice is the reference frame
      if (level < cfg.top_level || level > cfg.top_level + cfg.depth)
        throw std::out_of_range("explicit shifts do not cover level " + std::to_string(level));
      return cfg.shift_values[static_cast<std::size_t>(level - cfg.top_level - 1)];
  }
  return 0.0;
}

// Position of border i of the level-L set: (i + shift) * spacing.
inline double border_position(int level, std::int64_t index, const BandConfig& cfg) {
  return (double(index) + level_shift(level, cfg)) * level_spacing(level, cfg);
}

// Precomputed per-level tables for the hot lookup path. Levels are indexed
// relative to top_level; entry k describes level top_level + k, k = 0..depth.
struct LookupContext {
  BandConfig cfg;
  std::vector<double> spacing;
  std::vector<double> density;
  std::vector<double> shift;
  double inv_log_step = 0.0;

  explicit LookupContext(BandConfig c) : cfg(std::move(c)) {
    cfg.validate();
    spacing.resize(static_cast<std::size_t>(cfg.depth) + 1);
    density.resize(static_cast<std::size_t>(cfg.depth) + 1);
    shift.resize(static_cast<std::size_t>(cfg.depth) + 1);
    for (int k = 0; k <= cfg.depth; ++k) {
      spacing[static_cast<std::size_t>(k)] = level_spacing(cfg.top_level + k, cfg);
      density[static_cast<std::size_t>(k)] = level_density(cfg.top_level + k, cfg);
      shift[static_cast<std::size_t>(k)] = level_shift(cfg.top_level + k, cfg);
    }
    inv_log_step = 1.0 / std::log(cfg.step());
  }

  double spacing_at(int level) const { return spacing[static_cast<std::size_t>(level - cfg.top_level)]; }
  double density_at(int level) const { return density[static_cast<std::size_t>(level - cfg.top_level)]; }
  double shift_at(int level) const { return shift[static_cast<std::size_t>(level - cfg.top_level)]; }
  double border(int level, std::int64_t index) const {
    return (double(index) + shift_at(level)) * spacing_at(level);
  }
};

struct QuantizedDensity {
  int fine_level = 0;    // smallest L with step^L >= d
  int coarse_level = 0;  // fine_level - 1
  double alpha = 0.0;    // pull strength toward the coarse set, 0 at d == step^fine
  bool clamped = false;  // d fell outside (step^top, step^(top+depth)]
};

struct BorderRef {
  std::int64_t index = 0;
  double position = 0.0;
};

struct LocalBand {
  int level = 0;
  std::int64_t index = 0;      // undeformed band rank at that level
  double left_border = 0.0;    // deformed, in v units
  double right_border = 0.0;   // deformed
  double local_coord = 0.0;    // (v - left) / (right - left), in [0, 1)
};

struct GlobalBandId {
  std::uint64_t id = 0;        // top index in the high bits, path bits below
  bool just_appeared = false;  // band closes at the first transition of the walk
  int birth_level = 0;         // level of the deepest set path bit, else top_level
};

struct BandSample {
  double v = 0.0;
  double d = 0.0;
  int level = 0;
  std::int64_t index = 0;
  double left_border = 0.0;
  double right_border = 0.0;
  double local_coord = 0.0;
  std::uint64_t id = 0;
  bool just_appeared = false;  // birth at the lookup level while still opening (alpha > 0)
  int birth_level = 0;
  bool d_clamped = false;
};

// Quantizes d into the bracketing levels. The epsilon inside the ceiling keeps
// exact level densities on the alpha = 0 branch.
inline QuantizedDensity quantize(double d, const LookupContext& ctx,
                                 DensityPolicy policy = DensityPolicy::Clamp) {
  const BandConfig& cfg = ctx.cfg;
  const double d_min = ctx.density_at(cfg.top_level);
  const double d_max = ctx.density_at(cfg.top_level + cfg.depth);
  QuantizedDensity q;
  if (!(d > d_min && d <= d_max)) {
    if (policy == DensityPolicy::Strict || std::isnan(d))
      throw std::domain_error("density out of range: d must lie in (step^top, step^(top+depth)]");
    q.clamped = true;
    d = (d <= d_min) ? d_min * (1.0 + 1e-8) : d_max;
  }
  int fine = static_cast<int>(std::ceil(std::log(d) * ctx.inv_log_step - 1e-9));
  fine = std::clamp(fine, cfg.top_level + 1, cfg.top_level + cfg.depth);
  q.fine_level = fine;
  q.coarse_level = fine - 1;
  const double rho_f = ctx.density_at(fine);
  const double rho_c = ctx.density_at(fine - 1);
  double a = (rho_f - d) / (rho_f - rho_c);
  a = std::clamp(a, 0.0, 1.0);
  if (cfg.profile == Profile::Smoothstep) a = a * a * (3.0 - 2.0 * a);
  q.alpha = a;
  return q;
}

inline QuantizedDensity quantize(double d, const BandConfig& cfg,
                                 DensityPolicy policy = DensityPolicy::Clamp) {
  return quantize(d, LookupContext(cfg), policy);
}

// Border of the level-L set nearest to x; exact half ties round toward +inf.
inline BorderRef nearest_coarse_border(double x, int level, const LookupContext& ctx) {
  const double sp = ctx.spacing_at(level);
  const double r = ctx.shift_at(level);
  const std::int64_t j = static_cast<std::int64_t>(std::floor(x / sp - r + 0.5));
  return {j, (double(j) + r) * sp};
}

inline BorderRef nearest_coarse_border(double x, int level, const BandConfig& cfg) {
  return nearest_coarse_border(x, level, LookupContext(cfg));
}

// One level transition of the undeformed band (level, index): the parent index
// at level-1 and whether both borders collapse onto the same coarse border.
struct Transition {
  std::int64_t parent_index = 0;
  bool closes = false;
};

inline Transition transition_step(int level, std::int64_t index, const LookupContext& ctx) {
  const BorderRef left = nearest_coarse_border(ctx.border(level, index), level - 1, ctx);
  const BorderRef right = nearest_coarse_border(ctx.border(level, index + 1), level - 1, ctx);
  return {left.index, left.index == right.index};
}

// Band of the quantized fine set containing v, with borders pulled toward
// their nearest coarse border by alpha. The undeformed candidate index can be
// off by at most one band, so a single adjustment step suffices.
inline LocalBand local_band_at(double v, const QuantizedDensity& q, const LookupContext& ctx) {
  const int fine = q.fine_level;
  const double sp = ctx.spacing_at(fine);
  const double r = ctx.shift_at(fine);
  const double alpha = q.alpha;

  auto deformed = [&](std::int64_t idx) {
    const double b = (double(idx) + r) * sp;
    const BorderRef nb = nearest_coarse_border(b, fine - 1, ctx);
    return b + alpha * (nb.position - b);
  };

  std::int64_t i = static_cast<std::int64_t>(std::floor(v / sp - r));
  double left = deformed(i);
  double right = deformed(i + 1);
  if (v < left) {
    --i;
    right = left;
    left = deformed(i);
  } else if (v >= right) {
    ++i;
    left = right;
    right = deformed(i + 1);
  }
  assert(left <= v && v < right);

  LocalBand band;
  band.level = fine;
  band.index = i;
  band.left_border = left;
  band.right_border = right;
  band.local_coord = std::clamp((v - left) / (right - left), 0.0, 0x1.fffffffffffffp-1);
  return band;
}

inline LocalBand local_band(double v, double d, const LookupContext& ctx,
                            DensityPolicy policy = DensityPolicy::Clamp) {
  return local_band_at(v, quantize(d, ctx, policy), ctx);
}

inline LocalBand local_band(double v, double d, const BandConfig& cfg,
                            DensityPolicy policy = DensityPolicy::Clamp) {
  return local_band(v, d, LookupContext(cfg), policy);
}

// Hierarchical numbering of a band at its fine level. The walk ascends one
// level at a time over undeformed borders; a closing transition at level L
// contributes a 1 bit at position depth - (L - top_level), so coarser
// transitions occupy more significant path bits and a deeper lookup of a
// persisting band only appends zeros.
inline GlobalBandId global_id(const LocalBand& band, const LookupContext& ctx) {
  const BandConfig& cfg = ctx.cfg;
  const int rel = band.level - cfg.top_level;
  if (rel < 0 || rel > cfg.depth)
    throw std::out_of_range("depth budget exceeded at level " + std::to_string(band.level));

  GlobalBandId out;
  out.birth_level = cfg.top_level;
  std::uint64_t path = 0;
  std::int64_t index = band.index;
  bool birth_set = false;
  for (int level = band.level; level > cfg.top_level; --level) {
    const Transition tr = transition_step(level, index, ctx);
    if (tr.closes) {
      path |= std::uint64_t(1) << (cfg.depth - (level - cfg.top_level));
      if (!birth_set) {
        out.birth_level = level;
        birth_set = true;
        if (level == band.level) out.just_appeared = true;
      }
    }
    index = tr.parent_index;
  }
  out.id = (static_cast<std::uint64_t>(index) << cfg.depth) | path;
  return out;
}

inline GlobalBandId global_id(const LocalBand& band, const BandConfig& cfg) {
  return global_id(band, LookupContext(cfg));
}

// Full lookup: pure, deterministic function of (v, d, config).
inline BandSample band_lookup(double v, double d, const LookupContext& ctx,
                              DensityPolicy policy = DensityPolicy::Clamp) {
  const QuantizedDensity q = quantize(d, ctx, policy);
  const LocalBand band = local_band_at(v, q, ctx);
  const GlobalBandId gid = global_id(band, ctx);
  BandSample s;
  s.v = v;
  s.d = d;
  s.level = band.level;
  s.index = band.index;
  s.left_border = band.left_border;
  s.right_border = band.right_border;
  s.local_coord = band.local_coord;
  s.id = gid.id;
  // At alpha == 0 the fine set is shown exactly, so every band is fully
  // deployed regardless of where it was born.
  s.just_appeared = gid.just_appeared && q.alpha > 0.0;
  s.birth_level = gid.birth_level;
  s.d_clamped = q.clamped;
  return s;
}

inline BandSample band_lookup(double v, double d, const BandConfig& cfg,
                              DensityPolicy policy = DensityPolicy::Clamp) {
  return band_lookup(v, d, LookupContext(cfg), policy);
}

}  // namespace bandpat
