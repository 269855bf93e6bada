#pragma once

// Text scene configs: the unit of reproducibility for the CLI. Sections
// [bands], [fields], [view], [output], plus [bands2]/[fields2] for a second
// band set. Unknown sections or keys are rejected.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bandpat/image_io.hpp"
#include "bandpat/raster.hpp"

namespace bandpat {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct OutputSpec {
  enum class Mode { Bands, Curves, Centerlines, Tear, Weave } mode = Mode::Bands;
  int tear_cutoff = 0;       // Tear: keep bands born at or above this level
  double weave_thin = 0.25;  // Weave: half width fraction
  int width = 512;
  int height = 512;
  double simplify = 0.0;  // curve simplification tolerance, world units
  int smooth = 0;         // midpoint smoothing passes for curves
  bool operator==(const OutputSpec&) const = default;
};

struct SceneConfig {
  Scene scene;
  OutputSpec output;
};

inline bool field_spec_equal(const FieldSpec& a, const FieldSpec& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == FieldSpec::Kind::Expr) return expr_equal(a.program, b.program);
  return a.image_path == b.image_path && a.image.lo == b.image.lo && a.image.hi == b.image.hi;
}

inline bool density_spec_equal(const DensitySpec& a, const DensitySpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case DensitySpec::Kind::Expr: return expr_equal(a.program, b.program);
    case DensitySpec::Kind::Constant: return a.constant == b.constant;
    case DensitySpec::Kind::Stretch: return a.stretch_spacing == b.stretch_spacing;
  }
  return false;
}

inline bool band_set_equal(const BandSet& a, const BandSet& b) {
  return field_spec_equal(a.u, b.u) && density_spec_equal(a.d, b.d) && a.config == b.config;
}

inline bool scene_config_equal(const SceneConfig& a, const SceneConfig& b) {
  if (!band_set_equal(a.scene.primary, b.scene.primary)) return false;
  if (a.scene.secondary.has_value() != b.scene.secondary.has_value()) return false;
  if (a.scene.secondary && !band_set_equal(*a.scene.secondary, *b.scene.secondary)) return false;
  return a.scene.view == b.scene.view && a.scene.time == b.scene.time &&
         a.output == b.output;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string unquote(const std::string& s, int line) {
  if (s.size() >= 2 && s.front() == '"') {
    if (s.back() != '"') throw ConfigError(line, "unterminated quoted value");
    return s.substr(1, s.size() - 2);
  }
  return s;
}

inline double parse_double(const std::string& s, int line, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw ConfigError(line, std::string("malformed number for ") + what + ": '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, int line, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty())
    throw ConfigError(line, std::string("malformed integer for ") + what + ": '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline FieldProgram parse_field_expr(const std::string& text, int line) {
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    throw ConfigError(line, std::string("bad expression: ") + e.what());
  }
}

struct RawSection {
  bool seen = false;
  int line = 0;
};

}  // namespace detail

// Parses and fully validates a scene config. Image paths resolve relative to
// base_dir.
inline SceneConfig parse_scene_config(const std::string& text,
                                      const std::string& base_dir = ".") {
  SceneConfig out;
  BandSet* bands[2] = {&out.scene.primary, nullptr};
  BandSet secondary;  // adopted at the end if its sections appeared

  detail::RawSection sec_bands[2], sec_fields[2], sec_view, sec_output;
  bool step_set[2] = {false, false}, shifts_set[2] = {false, false};
  bool u_set[2] = {false, false}, d_set[2] = {false, false};
  bool rect_set = false;

  bands[1] = &secondary;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::string section;

  auto bad_key = [&](const std::string& key) {
    throw ConfigError(line, "unknown key '" + key + "' in section [" + section + "]");
  };

  auto parse_band_key = [&](int set, const std::string& key, const std::string& value) {
    BandConfig& cfg = bands[set]->config;
    if (key == "step") {
      const std::string v = detail::unquote(value, line);
      const auto parts = detail::split(v, '/');
      if (parts.size() > 2) throw ConfigError(line, "step must be N or N/M");
      long long num = detail::parse_int(detail::trim(parts[0]), line, "step");
      long long den = parts.size() == 2 ? detail::parse_int(detail::trim(parts[1]), line, "step") : 1;
      if (num < 1 || den < 1) throw ConfigError(line, "step terms must be positive");
      const long long g = std::gcd(num, den);
      num /= g;
      den /= g;
      if (!(den < num && num <= 2 * den))
        throw ConfigError(line, "step must lie in (1,2]");
      cfg.step_num = num;
      cfg.step_den = den;
      step_set[set] = true;
    } else if (key == "top_level") {
      cfg.top_level = static_cast<int>(detail::parse_int(value, line, "top_level"));
    } else if (key == "depth") {
      const long long d = detail::parse_int(value, line, "depth");
      if (d < 1 || d > 62) throw ConfigError(line, "depth must lie in [1,62]");
      cfg.depth = static_cast<int>(d);
    } else if (key == "shifts") {
      if (value == "halves") {
        cfg.shift_mode = ShiftMode::Halves;
      } else if (value.rfind("hashed:", 0) == 0) {
        cfg.shift_mode = ShiftMode::Hashed;
        cfg.shift_seed =
            static_cast<std::uint64_t>(detail::parse_int(value.substr(7), line, "shift seed"));
      } else if (value.rfind("explicit:", 0) == 0) {
        cfg.shift_mode = ShiftMode::Explicit;
        cfg.shift_values.clear();
        for (const std::string& part : detail::split(value.substr(9), ',')) {
          const double r = detail::parse_double(detail::trim(part), line, "shift");
          if (!(r >= 0.0 && r < 1.0)) throw ConfigError(line, "shifts must lie in [0,1)");
          cfg.shift_values.push_back(r);
        }
      } else {
        throw ConfigError(line, "shifts must be halves, hashed:SEED or explicit:r1,r2,...");
      }
      shifts_set[set] = true;
    } else if (key == "profile") {
      if (value == "linear")
        cfg.profile = Profile::Linear;
      else if (value == "smoothstep")
        cfg.profile = Profile::Smoothstep;
      else
        throw ConfigError(line, "profile must be linear or smoothstep");
    } else {
      bad_key(key);
    }
  };

  auto parse_fields_key = [&](int set, const std::string& key, const std::string& value) {
    if (key == "u") {
      FieldSpec& u = bands[set]->u;
      if (value.rfind("image:", 0) == 0) {
        const auto parts = detail::split(value.substr(6), ':');
        if (parts.size() < 3) throw ConfigError(line, "image field needs image:path:lo:hi");
        const double hi = detail::parse_double(parts.back(), line, "image hi");
        const double lo = detail::parse_double(parts[parts.size() - 2], line, "image lo");
        std::string path = parts[0];
        for (std::size_t k = 1; k + 2 < parts.size(); ++k) path += ":" + parts[k];
        u.kind = FieldSpec::Kind::Image;
        u.image_path = path;
        const GrayImage img = read_pgm((std::filesystem::path(base_dir) / path).string());
        u.image.width = img.width;
        u.image.height = img.height;
        u.image.values = img.values;
        u.image.lo = lo;
        u.image.hi = hi;
      } else {
        u.kind = FieldSpec::Kind::Expr;
        u.program = detail::parse_field_expr(detail::unquote(value, line), line);
      }
      u_set[set] = true;
    } else if (key == "d") {
      DensitySpec& d = bands[set]->d;
      if (value.rfind("const:", 0) == 0) {
        d.kind = DensitySpec::Kind::Constant;
        d.constant = detail::parse_double(value.substr(6), line, "density");
        if (!(d.constant > 0.0)) throw ConfigError(line, "constant density must be positive");
      } else if (value.rfind("stretch:", 0) == 0) {
        d.kind = DensitySpec::Kind::Stretch;
        d.stretch_spacing = detail::parse_double(value.substr(8), line, "stretch spacing");
        if (!(d.stretch_spacing > 0.0))
          throw ConfigError(line, "stretch spacing must be positive");
      } else {
        d.kind = DensitySpec::Kind::Expr;
        d.program = detail::parse_field_expr(detail::unquote(value, line), line);
      }
      d_set[set] = true;
    } else {
      bad_key(key);
    }
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      detail::RawSection* rs = nullptr;
      if (section == "bands") rs = &sec_bands[0];
      else if (section == "bands2") rs = &sec_bands[1];
      else if (section == "fields") rs = &sec_fields[0];
      else if (section == "fields2") rs = &sec_fields[1];
      else if (section == "view") rs = &sec_view;
      else if (section == "output") rs = &sec_output;
      else throw ConfigError(line, "unknown section [" + section + "]");
      rs->seen = true;
      rs->line = line;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError(line, "key outside any section");

    if (section == "bands" || section == "bands2") {
      parse_band_key(section == "bands" ? 0 : 1, key, value);
    } else if (section == "fields" || section == "fields2") {
      parse_fields_key(section == "fields" ? 0 : 1, key, value);
    } else if (section == "view") {
      if (key == "rect") {
        const auto parts = detail::split(value, ',');
        if (parts.size() != 4) throw ConfigError(line, "rect needs x0,y0,x1,y1");
        ViewRect r;
        r.x0 = detail::parse_double(detail::trim(parts[0]), line, "rect");
        r.y0 = detail::parse_double(detail::trim(parts[1]), line, "rect");
        r.x1 = detail::parse_double(detail::trim(parts[2]), line, "rect");
        r.y1 = detail::parse_double(detail::trim(parts[3]), line, "rect");
        if (!(r.x0 < r.x1 && r.y0 < r.y1))
          throw ConfigError(line, "view rectangle is degenerate");
        out.scene.view = r;
        rect_set = true;
      } else if (key == "t") {
        out.scene.time = detail::parse_double(value, line, "t");
      } else {
        bad_key(key);
      }
    } else if (section == "output") {
      if (key == "mode") {
        if (value == "bands") out.output.mode = OutputSpec::Mode::Bands;
        else if (value == "curves") out.output.mode = OutputSpec::Mode::Curves;
        else if (value == "centerlines") out.output.mode = OutputSpec::Mode::Centerlines;
        else if (value.rfind("tear:", 0) == 0) {
          out.output.mode = OutputSpec::Mode::Tear;
          out.output.tear_cutoff =
              static_cast<int>(detail::parse_int(value.substr(5), line, "tear cutoff"));
        } else if (value == "weave") {
          out.output.mode = OutputSpec::Mode::Weave;
        } else if (value.rfind("weave:", 0) == 0) {
          out.output.mode = OutputSpec::Mode::Weave;
          out.output.weave_thin = detail::parse_double(value.substr(6), line, "weave thin");
          if (!(out.output.weave_thin > 0.0 && out.output.weave_thin <= 0.5))
            throw ConfigError(line, "weave thin fraction must lie in (0, 0.5]");
        } else {
          throw ConfigError(line, "mode must be bands, curves, centerlines, tear:K or weave[:F]");
        }
      } else if (key == "resolution") {
        const auto parts = detail::split(value, 'x');
        if (parts.size() != 2) throw ConfigError(line, "resolution needs WxH");
        const long long w = detail::parse_int(detail::trim(parts[0]), line, "resolution");
        const long long h = detail::parse_int(detail::trim(parts[1]), line, "resolution");
        if (w < 1 || h < 1 || w > 16384 || h > 16384)
          throw ConfigError(line, "resolution out of range");
        out.output.width = static_cast<int>(w);
        out.output.height = static_cast<int>(h);
      } else if (key == "simplify") {
        out.output.simplify = detail::parse_double(value, line, "simplify");
        if (out.output.simplify < 0.0) throw ConfigError(line, "simplify must be >= 0");
      } else if (key == "smooth") {
        out.output.smooth = static_cast<int>(detail::parse_int(value, line, "smooth"));
        if (out.output.smooth < 0) throw ConfigError(line, "smooth must be >= 0");
      } else {
        bad_key(key);
      }
    }
  }

  // presence checks
  auto require = [&](bool ok, int at, const std::string& msg) {
    if (!ok) throw ConfigError(at, msg);
  };
  require(sec_bands[0].seen, 1, "missing [bands] section");
  require(sec_fields[0].seen, 1, "missing [fields] section");
  require(sec_view.seen, 1, "missing [view] section");
  require(step_set[0], sec_bands[0].line, "missing required key 'step'");
  require(u_set[0], sec_fields[0].line, "missing required key 'u'");
  require(d_set[0], sec_fields[0].line, "missing required key 'd'");
  require(rect_set, sec_view.line, "missing required key 'rect'");
  if (sec_bands[1].seen != sec_fields[1].seen)
    throw ConfigError(sec_bands[1].seen ? sec_bands[1].line : sec_fields[1].line,
                      "[bands2] and [fields2] must appear together");
  if (sec_bands[1].seen) {
    require(step_set[1], sec_bands[1].line, "missing required key 'step'");
    require(u_set[1], sec_fields[1].line, "missing required key 'u'");
    require(d_set[1], sec_fields[1].line, "missing required key 'd'");
  }

  // defaults and final validation per band set
  for (int set = 0; set < 2; ++set) {
    if (set == 1 && !sec_bands[1].seen) break;
    BandConfig& cfg = bands[set]->config;
    if (!shifts_set[set]) {
      if (cfg.step_num == 2 && cfg.step_den == 1) {
        cfg.shift_mode = ShiftMode::Halves;
      } else {
        cfg.shift_mode = ShiftMode::Hashed;
        cfg.shift_seed = 0;
      }
    }
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(sec_bands[set].line, e.what());
    }
  }
  if (sec_bands[1].seen) out.scene.secondary = secondary;

  if (out.output.mode == OutputSpec::Mode::Weave && !out.scene.secondary)
    throw ConfigError(sec_output.seen ? sec_output.line : 1,
                      "weave mode needs [bands2]/[fields2]");
  if (out.output.mode == OutputSpec::Mode::Tear) {
    const BandConfig& cfg = out.scene.primary.config;
    if (out.output.tear_cutoff < cfg.top_level ||
        out.output.tear_cutoff > cfg.top_level + cfg.depth)
      throw ConfigError(sec_output.line, "tear cutoff outside [top_level, top_level+depth]");
  }
  return out;
}

inline SceneConfig load_scene_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError(0, "cannot open config: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_scene_config(buf.str(),
                            std::filesystem::path(path).parent_path().string());
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print_band_set(std::string& out, const BandSet& set, const char* bands_name,
                           const char* fields_name) {
  const BandConfig& cfg = set.config;
  out += std::string("[") + bands_name + "]\n";
  out += "step = " + std::to_string(cfg.step_num);
  if (cfg.step_den != 1) out += "/" + std::to_string(cfg.step_den);
  out += "\n";
  out += "top_level = " + std::to_string(cfg.top_level) + "\n";
  out += "depth = " + std::to_string(cfg.depth) + "\n";
  out += "shifts = ";
  switch (cfg.shift_mode) {
    case ShiftMode::Halves:
      out += "halves";
      break;
    case ShiftMode::Hashed:
      out += "hashed:" + std::to_string(cfg.shift_seed);
      break;
    case ShiftMode::Explicit: {
      out += "explicit:";
      for (std::size_t k = 0; k < cfg.shift_values.size(); ++k) {
        if (k) out += ",";
        out += fmt17(cfg.shift_values[k]);
      }
      break;
    }
  }
  out += "\n";
  out += std::string("profile = ") + (cfg.profile == Profile::Linear ? "linear" : "smoothstep") +
         "\n\n";

  out += std::string("[") + fields_name + "]\n";
  if (set.u.kind == FieldSpec::Kind::Expr) {
    out += "u = \"" + print_expression(set.u.program) + "\"\n";
  } else {
    out += "u = image:" + set.u.image_path + ":" + fmt17(set.u.image.lo) + ":" +
           fmt17(set.u.image.hi) + "\n";
  }
  switch (set.d.kind) {
    case DensitySpec::Kind::Expr:
      out += "d = \"" + print_expression(set.d.program) + "\"\n";
      break;
    case DensitySpec::Kind::Constant:
      out += "d = const:" + fmt17(set.d.constant) + "\n";
      break;
    case DensitySpec::Kind::Stretch:
      out += "d = stretch:" + fmt17(set.d.stretch_spacing) + "\n";
      break;
  }
  out += "\n";
}

}  // namespace detail

// Canonical text form; parse(print(config)) reproduces the config exactly.
inline std::string print_scene_config(const SceneConfig& config) {
  std::string out;
  detail::print_band_set(out, config.scene.primary, "bands", "fields");
  if (config.scene.secondary)
    detail::print_band_set(out, *config.scene.secondary, "bands2", "fields2");

  out += "[view]\n";
  out += "rect = " + detail::fmt17(config.scene.view.x0) + "," + detail::fmt17(config.scene.view.y0) +
         "," + detail::fmt17(config.scene.view.x1) + "," + detail::fmt17(config.scene.view.y1) + "\n";
  out += "t = " + detail::fmt17(config.scene.time) + "\n\n";

  out += "[output]\n";
  out += "mode = ";
  switch (config.output.mode) {
    case OutputSpec::Mode::Bands: out += "bands"; break;
    case OutputSpec::Mode::Curves: out += "curves"; break;
    case OutputSpec::Mode::Centerlines: out += "centerlines"; break;
    case OutputSpec::Mode::Tear: out += "tear:" + std::to_string(config.output.tear_cutoff); break;
    case OutputSpec::Mode::Weave: out += "weave:" + detail::fmt17(config.output.weave_thin); break;
  }
  out += "\n";
  out += "resolution = " + std::to_string(config.output.width) + "x" +
         std::to_string(config.output.height) + "\n";
  out += "simplify = " + detail::fmt17(config.output.simplify) + "\n";
  out += "smooth = " + std::to_string(config.output.smooth) + "\n";
  return out;
}

}  // namespace bandpat
