#pragma once

// Binary PPM (P6) output and 8-bit grayscale PGM (P5) input.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bandpat/render.hpp"

namespace bandpat {

inline std::string ppm_bytes(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.reserve(out.size() + img.pixels.size() * 3);
  for (const Rgb& p : img.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

inline void write_ppm(const Image& img, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  const std::string bytes = ppm_bytes(img);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline int pgm_token(std::istream& in) {
  // skips whitespace and '#' comments
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error("malformed PGM header");
  return value;
}

}  // namespace detail

// Loads an 8-bit P5 image as values in [0, 1]; row 0 is the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;
};

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open image: " + path);
  char magic[2] = {0, 0};
  file.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("unsupported image format (want binary PGM / P5): " + path);
  GrayImage img;
  img.width = detail::pgm_token(file);
  img.height = detail::pgm_token(file);
  const int maxval = detail::pgm_token(file);
  if (img.width < 1 || img.height < 1) throw std::runtime_error("bad PGM dimensions: " + path);
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error("only 8-bit PGM images are supported: " + path);
  file.get();  // single whitespace after maxval
  std::vector<char> raw(static_cast<std::size_t>(img.width) * img.height);
  file.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (file.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("truncated PGM data: " + path);
  img.values.reserve(raw.size());
  for (char c : raw)
    img.values.push_back(static_cast<unsigned char>(c) / static_cast<double>(maxval));
  return img;
}

}  // namespace bandpat
