#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "bandpat/band.hpp"

namespace testutil {

inline bandpat::BandConfig make_config(std::int64_t num, std::int64_t den,
                                       bandpat::ShiftMode mode, int depth,
                                       std::uint64_t seed = 0) {
  bandpat::BandConfig cfg;
  cfg.step_num = num;
  cfg.step_den = den;
  cfg.depth = depth;
  cfg.shift_mode = mode;
  cfg.shift_seed = seed;
  if (mode == bandpat::ShiftMode::Explicit) cfg.shift_values.assign(depth, 0.0);
  return cfg;
}

inline bandpat::BandConfig with_random_shifts(bandpat::BandConfig cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  cfg.shift_mode = bandpat::ShiftMode::Explicit;
  cfg.shift_values.clear();
  for (int k = 0; k < cfg.depth; ++k) cfg.shift_values.push_back(uni(rng));
  return cfg;
}

// Density whose linear-profile quantization lands on fine_level with the
// given pull strength.
inline double density_for_alpha(const bandpat::BandConfig& cfg, int fine_level, double alpha) {
  const double rho_f = bandpat::level_density(fine_level, cfg);
  const double rho_c = bandpat::level_density(fine_level - 1, cfg);
  return rho_f - alpha * (rho_f - rho_c);
}

}  // namespace testutil
