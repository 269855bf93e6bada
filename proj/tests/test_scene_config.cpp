#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bandpat/bandpat.hpp"

using namespace bandpat;
using Catch::Approx;

namespace {

const char* kMinimal = R"(
[bands]
step = 2

[fields]
u = "x"
d = const:3

[view]
rect = 0,0,1,1

[output]
resolution = 64x64
)";

std::string patched(const std::string& text, const std::string& from, const std::string& to) {
  std::string out = text;
  out.replace(out.find(from), from.size(), to);
  return out;
}

int error_line(const std::string& text) {
  try {
    parse_scene_config(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal config parses with documented defaults") {
  const SceneConfig config = parse_scene_config(kMinimal);
  const BandConfig& cfg = config.scene.primary.config;
  CHECK(cfg.step_num == 2);
  CHECK(cfg.step_den == 1);
  CHECK(cfg.top_level == 0);
  CHECK(cfg.depth == 24);
  CHECK(cfg.shift_mode == ShiftMode::Halves);  // default for step 2
  CHECK(cfg.profile == Profile::Linear);
  CHECK(config.scene.primary.d.kind == DensitySpec::Kind::Constant);
  CHECK(config.scene.primary.d.constant == 3.0);
  CHECK(config.scene.time == 0.0);
  CHECK(config.output.mode == OutputSpec::Mode::Bands);
  CHECK(config.output.width == 64);
  CHECK_FALSE(config.scene.secondary.has_value());
}

TEST_CASE("step validation and defaults") {
  SECTION("rational step accepted") {
    const SceneConfig c = parse_scene_config(patched(kMinimal, "step = 2", "step = 17/13"));
    CHECK(c.scene.primary.config.step_num == 17);
    CHECK(c.scene.primary.config.step_den == 13);
    CHECK(c.scene.primary.config.shift_mode == ShiftMode::Hashed);  // non-2 default
    CHECK(c.scene.primary.config.shift_seed == 0);
  }
  SECTION("quoted step accepted") {
    const SceneConfig c = parse_scene_config(patched(kMinimal, "step = 2", "step = \"3/2\""));
    CHECK(c.scene.primary.config.step_num == 3);
  }
  SECTION("reducible fractions are reduced") {
    const SceneConfig c = parse_scene_config(patched(kMinimal, "step = 2", "step = 4/2"));
    CHECK(c.scene.primary.config.step_num == 2);
    CHECK(c.scene.primary.config.step_den == 1);
    CHECK(c.scene.primary.config.shift_mode == ShiftMode::Halves);
  }
  SECTION("step outside (1,2] rejected") {
    CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "step = 2", "step = 5/2")),
                    ConfigError);
    CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "step = 2", "step = 1")),
                    ConfigError);
    CHECK(error_line(patched(kMinimal, "step = 2", "step = 5/2")) == 3);
  }
}

TEST_CASE("config errors carry line numbers and reject unknown keys") {
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "rect = 0,0,1,1",
                                             "rect = 0,0,1,1\nwibble = 3")),
                  ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "[view]", "[vista]")), ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "u = \"x\"", "u = \"x +\"")),
                  ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "rect = 0,0,1,1", "rect = 1,0,0,1")),
                  ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "d = const:3", "d = const:-1")),
                  ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "u = \"x\"", "q = \"x\"")), ConfigError);
  // missing required keys
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "step = 2", "depth = 8")), ConfigError);
  CHECK_THROWS_AS(parse_scene_config(patched(kMinimal, "d = const:3", "")), ConfigError);
  // explicit shifts must cover every level
  CHECK_THROWS_AS(
      parse_scene_config(patched(kMinimal, "step = 2",
                                 "step = 2\ndepth = 4\nshifts = explicit:0.1,0.2")),
      ConfigError);
  CHECK_NOTHROW(parse_scene_config(patched(
      kMinimal, "step = 2", "step = 2\ndepth = 4\nshifts = explicit:0.1,0.2,0.3,0.4")));
  // tear cutoff must stay inside the depth budget
  CHECK_THROWS_AS(
      parse_scene_config(patched(kMinimal, "resolution = 64x64",
                                 "resolution = 64x64\nmode = tear:40")),
      ConfigError);
  // weave needs the second band set
  CHECK_THROWS_AS(
      parse_scene_config(patched(kMinimal, "resolution = 64x64",
                                 "resolution = 64x64\nmode = weave")),
      ConfigError);
}

TEST_CASE("second band set parses and is required as a pair") {
  const std::string two_sets = std::string(kMinimal) + R"(
[bands2]
step = 3/2
shifts = explicit:0.5,0.25,0.125,0,0,0,0,0
depth = 8

[fields2]
u = "y"
d = "2+x"

[output]
mode = weave:0.3
)";
  const SceneConfig c = parse_scene_config(two_sets);
  REQUIRE(c.scene.secondary.has_value());
  CHECK(c.scene.secondary->config.step_num == 3);
  CHECK(c.scene.secondary->d.kind == DensitySpec::Kind::Expr);
  CHECK(c.output.mode == OutputSpec::Mode::Weave);
  CHECK(c.output.weave_thin == 0.3);

  const std::string only_bands2 = std::string(kMinimal) + "\n[bands2]\nstep = 2\n";
  CHECK_THROWS_AS(parse_scene_config(only_bands2), ConfigError);
}

TEST_CASE("print/parse round trip") {
  const std::string two_sets = std::string(kMinimal) + R"(
[bands2]
step = 3/2
shifts = explicit:0.5,0.25,0.125,0,0,0,0,0
depth = 8

[fields2]
u = "sin(x)*0.5+1.5"
d = stretch:0.125

[view]
t = 0.75

[output]
mode = weave:0.3
simplify = 0.001
smooth = 2
)";
  for (const std::string& text : {std::string(kMinimal), two_sets}) {
    const SceneConfig config = parse_scene_config(text);
    const std::string printed = print_scene_config(config);
    const SceneConfig back = parse_scene_config(printed);
    REQUIRE(scene_config_equal(config, back));
    REQUIRE(print_scene_config(back) == printed);
  }
}

TEST_CASE("image fields load from PGM and round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bandpat_cfg_test";
  fs::create_directories(dir);
  {
    std::ofstream pgm(dir / "u.pgm", std::ios::binary);
    pgm << "P5\n# painted field\n2 2\n255\n";
    const unsigned char data[4] = {0, 85, 170, 255};
    pgm.write(reinterpret_cast<const char*>(data), 4);
  }
  const std::string text = patched(kMinimal, "u = \"x\"", "u = image:u.pgm:1:4");
  const SceneConfig config = parse_scene_config(text, dir.string());
  REQUIRE(config.scene.primary.u.kind == FieldSpec::Kind::Image);
  const ImageField& img = config.scene.primary.u.image;
  CHECK(img.width == 2);
  CHECK(img.lo == 1.0);
  CHECK(img.hi == 4.0);
  CHECK(img.values[0] == Approx(0.0));
  CHECK(img.values[3] == Approx(1.0));

  const std::string printed = print_scene_config(config);
  CHECK(printed.find("u = image:u.pgm:1:4\n") != std::string::npos);
  const SceneConfig back = parse_scene_config(printed, dir.string());
  REQUIRE(scene_config_equal(config, back));

  // image rectangle defaults to the view; sampling must honor the range
  Scene scene = config.scene;
  scene.primary.u.image.rx0 = scene.view.x0;
  scene.primary.u.image.ry0 = scene.view.y0;
  scene.primary.u.image.rx1 = scene.view.x1;
  scene.primary.u.image.ry1 = scene.view.y1;
  CHECK(scene.primary.u.eval(0.25, 0.75, 0.0) == Approx(1.0));  // top-left texel
}

TEST_CASE("curve emission formats") {
  const SceneConfig config = parse_scene_config(patched(
      std::string(kMinimal), "resolution = 64x64", "resolution = 32x32\nmode = curves"));
  const auto curves = scene_border_curves(config, 1);
  REQUIRE(!curves.empty());

  SECTION("json validates and follows the schema") {
    const std::string text = polylines_to_json(curves);
    const nlohmann::json doc = nlohmann::json::parse(text);
    REQUIRE(doc.contains("polylines"));
    REQUIRE(doc["polylines"].is_array());
    REQUIRE(doc["polylines"].size() == curves.size());
    for (const auto& poly : doc["polylines"]) {
      REQUIRE(poly["idA"].is_number_unsigned());
      REQUIRE(poly["idB"].is_number_unsigned());
      REQUIRE(poly["closed"].is_boolean());
      REQUIRE(poly["points"].is_array());
      REQUIRE(poly["points"].size() >= 2);
      REQUIRE(poly["points"][0].size() == 2);
    }
    // coordinates survive the 9-significant-digit formatting
    const double x0 = doc["polylines"][0]["points"][0][0].get<double>();
    CHECK(x0 == Approx(curves[0].points[0].x).epsilon(1e-8));
    CHECK(doc["polylines"][0]["idA"].get<std::uint64_t>() == curves[0].id_a);
  }
  SECTION("svg is one path per polyline") {
    const std::string svg = polylines_to_svg(curves, config.scene.view, 32, 32);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg ") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t paths = 0, pos = 0;
    while ((pos = svg.find("<path ", pos)) != std::string::npos) {
      ++paths;
      pos += 6;
    }
    CHECK(paths == curves.size());
  }
}

TEST_CASE("info report") {
  // explicit zero shifts give exactly four bands across the unit view at d=3
  const std::string text = patched(std::string(kMinimal), "step = 2",
                                   "step = 2\nshifts = explicit:0,0,0,0,0,0,0,0\ndepth = 8");
  const SceneConfig config = parse_scene_config(text);
  const std::string report = scene_info_report(config, 1);
  CHECK(report.find("distinct ids: 4\n") != std::string::npos);
  CHECK(report.find("resolution: 64x64\n") != std::string::npos);
  CHECK(report.find("just-appeared fraction:") != std::string::npos);
  CHECK(report.find("clamped cells: 0\n") != std::string::npos);
  CHECK(report.find("invalid cells: 0\n") != std::string::npos);
  CHECK(report.find("closures per transition:") != std::string::npos);
}
