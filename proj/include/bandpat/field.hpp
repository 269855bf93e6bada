#pragma once

// Control fields u(p) and d(p): analytic expressions or painted images,
// finite-difference gradients, and stretch-compensated density.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandpat/expr.hpp"

namespace bandpat {

// Grayscale grid sampled bilinearly over a world rectangle, constant beyond
// the edges. Row 0 is the top of the image (highest y).
struct ImageField {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, in [0, 1]
  double rx0 = 0.0, ry0 = 0.0, rx1 = 1.0, ry1 = 1.0;
  double lo = 0.0;  // output range
  double hi = 1.0;

  double sample(double x, double y) const {
    double tx = (x - rx0) / (rx1 - rx0) * width - 0.5;
    double ty = (ry1 - y) / (ry1 - ry0) * height - 0.5;
    tx = std::clamp(tx, 0.0, double(width - 1));
    ty = std::clamp(ty, 0.0, double(height - 1));
    const int i0 = static_cast<int>(tx);
    const int j0 = static_cast<int>(ty);
    const int i1 = std::min(i0 + 1, width - 1);
    const int j1 = std::min(j0 + 1, height - 1);
    const double fx = tx - i0;
    const double fy = ty - j0;
    auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * width + i]; };
    const double a = at(i0, j0) + (at(i1, j0) - at(i0, j0)) * fx;
    const double b = at(i0, j1) + (at(i1, j1) - at(i0, j1)) * fx;
    const double v = a + (b - a) * fy;
    return lo + v * (hi - lo);
  }
};

inline double sample_image_field(const ImageField& field, double x, double y) {
  return field.sample(x, y);
}

// Central differences of any scalar field callable as f(x, y, t).
template <class F>
std::pair<double, double> gradient_fd(F&& f, double x, double y, double t, double h) {
  const double gx = (f(x + h, y, t) - f(x - h, y, t)) / (2.0 * h);
  const double gy = (f(x, y + h, t) - f(x, y - h, t)) / (2.0 * h);
  return {gx, gy};
}

inline std::pair<double, double> gradient(const FieldProgram& prog, double x, double y,
                                          double t, double h) {
  return gradient_fd(
      [&](double px, double py, double pt) { return evaluate(prog, px, py, pt); }, x, y, t, h);
}

inline constexpr double kGradientFloor = 1e-6;

// Bands per unit of u such that the band spacing in world units is about
// `world_spacing`; the floor guards vanishing gradients.
template <class F>
double compensated_density_fd(F&& u, double x, double y, double t, double world_spacing,
                              double h, double grad_floor = kGradientFloor) {
  const auto [gx, gy] = gradient_fd(u, x, y, t, h);
  return 1.0 / (world_spacing * std::max(std::hypot(gx, gy), grad_floor));
}

inline double compensated_density(const FieldProgram& u, double x, double y, double t,
                                  double world_spacing, double h,
                                  double grad_floor = kGradientFloor) {
  return compensated_density_fd(
      [&](double px, double py, double pt) { return evaluate(u, px, py, pt); }, x, y, t,
      world_spacing, h, grad_floor);
}

}  // namespace bandpat
