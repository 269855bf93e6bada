// Command line front end: renders band images, extracts labeled curves, and
// reports scene diagnostics. Exit codes: 0 success, 1 config error, 2 runtime
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "bandpat/bandpat.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  int threads = 0;  // 0 = hardware concurrency
};

void write_text(const std::string& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

void warn_on_clamping(const bandpat::IdMap& map) {
  if (map.clamped_count > 0)
    std::cerr << "warning: density clamped on " << map.clamped_count << " of "
              << map.cells.size() << " cells\n";
  if (map.invalid_count > 0)
    std::cerr << "warning: field evaluation invalid on " << map.invalid_count << " of "
              << map.cells.size() << " cells\n";
}

int run_render(const Options& opt) {
  const bandpat::SceneConfig config = bandpat::load_scene_config(opt.config_path);
  const auto& out = config.output;
  bandpat::Image img;
  switch (out.mode) {
    case bandpat::OutputSpec::Mode::Bands: {
      const auto map = bandpat::rasterize(config.scene, out.width, out.height, opt.threads);
      warn_on_clamping(map);
      img = bandpat::colorize(map, bandpat::ColorStyle::BorderShade);
      break;
    }
    case bandpat::OutputSpec::Mode::Tear: {
      const auto map = bandpat::rasterize(config.scene, out.width, out.height, opt.threads);
      warn_on_clamping(map);
      img = bandpat::render_tear(map, out.tear_cutoff, config.scene.primary.config);
      break;
    }
    case bandpat::OutputSpec::Mode::Weave: {
      const auto map_a =
          bandpat::rasterize_set(config.scene, config.scene.primary, out.width, out.height,
                                 opt.threads);
      const auto map_b = bandpat::rasterize_set(config.scene, *config.scene.secondary,
                                                out.width, out.height, opt.threads);
      warn_on_clamping(map_a);
      warn_on_clamping(map_b);
      img = bandpat::render_weave(map_a, map_b, out.weave_thin);
      break;
    }
    default:
      throw bandpat::ConfigError(
          0, "config mode is not an image mode; use the curves or centerlines command");
  }
  bandpat::write_ppm(img, opt.out_path);
  return 0;
}

int run_curves(const Options& opt, bool centerlines) {
  const bandpat::SceneConfig config = bandpat::load_scene_config(opt.config_path);
  const bandpat::IdMap map = bandpat::rasterize(config.scene, config.output.width,
                                                config.output.height, opt.threads);
  warn_on_clamping(map);
  const auto curves = bandpat::postprocess_curves(
      centerlines ? bandpat::extract_centerlines(map) : bandpat::extract_borders(map),
      config.output);

  const std::string ext = std::filesystem::path(opt.out_path).extension().string();
  if (ext == ".json") {
    write_text(opt.out_path, bandpat::polylines_to_json(curves));
  } else if (ext == ".svg") {
    write_text(opt.out_path, bandpat::polylines_to_svg(curves, config.scene.view,
                                                       config.output.width,
                                                       config.output.height));
  } else {
    throw bandpat::ConfigError(0, "output must end in .svg or .json, got '" + ext + "'");
  }
  return 0;
}

int run_info(const Options& opt) {
  const bandpat::SceneConfig config = bandpat::load_scene_config(opt.config_path);
  std::cout << bandpat::scene_info_report(config, opt.threads);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"band pattern engine"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", opt.config_path, "scene config path")->required();
    if (needs_out) cmd->add_option("--out", opt.out_path, "output path")->required();
    cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)")
        ->check(CLI::Range(0, 256));
  };

  CLI::App* render = app.add_subcommand("render", "rasterize the scene to a PPM image");
  add_common(render, true);
  CLI::App* curves = app.add_subcommand("curves", "extract band border curves (SVG or JSON)");
  add_common(curves, true);
  CLI::App* centerlines =
      app.add_subcommand("centerlines", "extract band center lines (SVG or JSON)");
  add_common(centerlines, true);
  CLI::App* info = app.add_subcommand("info", "print scene diagnostics");
  add_common(info, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or requested help
    return code == 0 ? 0 : 1;      // usage problems count as config errors
  }

  try {
    if (render->parsed()) return run_render(opt);
    if (curves->parsed()) return run_curves(opt, false);
    if (centerlines->parsed()) return run_curves(opt, true);
    if (info->parsed()) return run_info(opt);
    return 1;
  } catch (const bandpat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const bandpat::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
