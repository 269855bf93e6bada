#pragma once

// Reference band enumeration. Builds the full parent/closure tree for a
// window by walking levels top-down and assigning ids by inheritance, i.e.
// without the per-point candidate/adjustment logic or the bottom-up bit walk
// of the lookup path. Intended for exhaustive checking.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "bandpat/band.hpp"

namespace bandpat {

struct OracleBand {
  int level = 0;
  std::int64_t index = 0;
  double lo = 0.0;   // undeformed left border
  double hi = 0.0;   // undeformed right border
  double lo1 = 0.0;  // left border pulled fully onto the coarse set (alpha = 1)
  double hi1 = 0.0;
  std::uint64_t id = 0;
  int birth_level = 0;

  // Deformed interval endpoints at a given pull strength.
  double left_at(double alpha) const { return lo + alpha * (lo1 - lo); }
  double right_at(double alpha) const { return hi + alpha * (hi1 - hi); }
};

// Enumerates every band of the level `fine_level` set whose undeformed left
// border falls in [window_lo, window_hi), with its id and birth level.
inline std::vector<OracleBand> oracle_bands(const BandConfig& cfg, double window_lo,
                                            double window_hi, int fine_level) {
  cfg.validate();
  if (fine_level < cfg.top_level || fine_level - cfg.top_level > cfg.depth)
    throw std::out_of_range("oracle fine level outside the depth budget");
  if (!(window_lo < window_hi) || !std::isfinite(window_lo) || !std::isfinite(window_hi))
    throw std::invalid_argument("oracle window must be bounded and non-empty");

  const LookupContext ctx(cfg);

  struct Entry {
    std::uint64_t id;
    int birth_level;
  };

  // Pad so every enumerated band's parent chain stays inside the tables.
  const double pad = 2.0 * ctx.spacing_at(cfg.top_level);
  std::vector<std::map<std::int64_t, Entry>> levels(
      static_cast<std::size_t>(fine_level - cfg.top_level) + 1);

  auto index_range = [&](int level) {
    const double sp = ctx.spacing_at(level);
    const double r = ctx.shift_at(level);
    const std::int64_t lo = static_cast<std::int64_t>(std::floor((window_lo - pad) / sp - r)) - 2;
    const std::int64_t hi = static_cast<std::int64_t>(std::ceil((window_hi + pad) / sp - r)) + 2;
    return std::pair<std::int64_t, std::int64_t>(lo, hi);
  };

  {
    auto [lo, hi] = index_range(cfg.top_level);
    for (std::int64_t k = lo; k <= hi; ++k)
      levels[0][k] = {static_cast<std::uint64_t>(k) << cfg.depth, cfg.top_level};
  }
  for (int level = cfg.top_level + 1; level <= fine_level; ++level) {
    auto& table = levels[static_cast<std::size_t>(level - cfg.top_level)];
    const auto& parents = levels[static_cast<std::size_t>(level - cfg.top_level - 1)];
    auto [lo, hi] = index_range(level);
    for (std::int64_t i = lo; i <= hi; ++i) {
      const Transition tr = transition_step(level, i, ctx);
      const auto parent = parents.find(tr.parent_index);
      if (parent == parents.end()) continue;  // outside the padded window
      Entry e = parent->second;
      if (tr.closes) {
        e.id |= std::uint64_t(1) << (cfg.depth - (level - cfg.top_level));
        e.birth_level = level;
      }
      table[i] = e;
    }
  }

  std::vector<OracleBand> leaves;
  const auto& fine = levels.back();
  for (const auto& [i, e] : fine) {
    const double lo = ctx.border(fine_level, i);
    if (!(lo >= window_lo && lo < window_hi)) continue;
    OracleBand band;
    band.level = fine_level;
    band.index = i;
    band.lo = lo;
    band.hi = ctx.border(fine_level, i + 1);
    if (fine_level > cfg.top_level) {
      band.lo1 = nearest_coarse_border(band.lo, fine_level - 1, ctx).position;
      band.hi1 = nearest_coarse_border(band.hi, fine_level - 1, ctx).position;
    } else {
      band.lo1 = band.lo;
      band.hi1 = band.hi;
    }
    band.id = e.id;
    band.birth_level = e.birth_level;
    leaves.push_back(band);
  }
  return leaves;
}

// Leaf whose deformed interval contains v, or nullptr if v falls outside the
// enumerated window.
inline const OracleBand* oracle_find(const std::vector<OracleBand>& leaves, double v,
                                     double alpha) {
  for (const auto& band : leaves)
    if (v >= band.left_at(alpha) && v < band.right_at(alpha)) return &band;
  return nullptr;
}

// Distance from v to the nearest deformed leaf border.
inline double oracle_border_distance(const std::vector<OracleBand>& leaves, double v,
                                     double alpha) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& band : leaves) {
    best = std::min(best, std::abs(v - band.left_at(alpha)));
    best = std::min(best, std::abs(v - band.right_at(alpha)));
  }
  return best;
}

}  // namespace bandpat
