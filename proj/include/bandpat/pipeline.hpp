#pragma once

// Scene-level entry points shared by the CLI and the test suites: image
// rendering per output mode, curve extraction with post-processing, and the
// diagnostics report.

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bandpat/emit.hpp"
#include "bandpat/extract.hpp"
#include "bandpat/render.hpp"
#include "bandpat/scene_config.hpp"

namespace bandpat {

inline Image render_scene_image(const SceneConfig& config, int threads = 0) {
  const Scene& scene = config.scene;
  const int w = config.output.width;
  const int h = config.output.height;
  switch (config.output.mode) {
    case OutputSpec::Mode::Bands:
      return colorize(rasterize(scene, w, h, threads), ColorStyle::BorderShade);
    case OutputSpec::Mode::Tear:
      return render_tear(rasterize(scene, w, h, threads), config.output.tear_cutoff,
                         scene.primary.config);
    case OutputSpec::Mode::Weave:
      return render_weave(scene, w, h, config.output.weave_thin, threads);
    default:
      throw std::invalid_argument(
          "config mode is not an image mode; use the curves or centerlines command");
  }
}

inline std::vector<LabeledPolyline> postprocess_curves(std::vector<LabeledPolyline> curves,
                                                       const OutputSpec& output) {
  if (output.smooth > 0)
    for (auto& poly : curves) poly = smooth_polyline(poly, output.smooth);
  if (output.simplify > 0.0)
    for (auto& poly : curves) poly = simplify_polyline(poly, output.simplify);
  return curves;
}

inline std::vector<LabeledPolyline> scene_border_curves(const SceneConfig& config,
                                                        int threads = 0) {
  const IdMap map =
      rasterize(config.scene, config.output.width, config.output.height, threads);
  return postprocess_curves(extract_borders(map), config.output);
}

inline std::vector<LabeledPolyline> scene_centerline_curves(const SceneConfig& config,
                                                            int threads = 0) {
  const IdMap map =
      rasterize(config.scene, config.output.width, config.output.height, threads);
  return postprocess_curves(extract_centerlines(map), config.output);
}

// Text diagnostics: band population, deployment state, per-transition
// closure counts, and clamp/invalid cell counts.
inline std::string scene_info_report(const SceneConfig& config, int threads = 0) {
  const IdMap map =
      rasterize(config.scene, config.output.width, config.output.height, threads);
  const BandConfig& cfg = config.scene.primary.config;

  std::set<std::uint64_t> ids;
  std::size_t valid = 0;
  std::size_t appearing = 0;
  for (const IdCell& cell : map.cells) {
    if (!cell.valid()) continue;
    ++valid;
    ids.insert(cell.id);
    if (cell.just_appeared()) ++appearing;
  }

  // a set path bit at position depth-k records a closure at transition
  // (top+k) -> (top+k-1)
  std::map<int, int> closures;
  for (std::uint64_t id : ids)
    for (int k = 1; k <= cfg.depth; ++k)
      if (id & (std::uint64_t(1) << (cfg.depth - k))) ++closures[k];

  std::ostringstream out;
  out << "resolution: " << map.width << "x" << map.height << "\n";
  out << "distinct ids: " << ids.size() << "\n";
  char frac[32];
  std::snprintf(frac, sizeof frac, "%.4f", valid ? double(appearing) / double(valid) : 0.0);
  out << "just-appeared fraction: " << frac << "\n";
  out << "clamped cells: " << map.clamped_count << "\n";
  out << "invalid cells: " << map.invalid_count << "\n";
  out << "closures per transition:\n";
  for (const auto& [k, count] : closures)
    out << "  level " << (cfg.top_level + k) << " -> " << (cfg.top_level + k - 1) << ": "
        << count << "\n";
  return out.str();
}

}  // namespace bandpat
