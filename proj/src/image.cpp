#include "patchnorm/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace patchnorm {

namespace {

int read_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then reads one unsigned integer.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw std::runtime_error("ppm: malformed header token");
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ppm: cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '6') {
    throw std::runtime_error("ppm: not a P6 file: " + path);
  }
  const int w = read_pnm_token(in);
  const int h = read_pnm_token(in);
  const int maxval = read_pnm_token(in);
  if (maxval != 255) throw std::runtime_error("ppm: only maxval 255 supported");
  if (w <= 0 || h <= 0) throw std::runtime_error("ppm: bad dimensions");

  Image img(w, h, PixelMode::PilExact);
  std::vector<std::uint8_t> raw(img.data.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("ppm: truncated pixel data in " + path);
  }
  for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i];
  return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& img) {
  if (img.mode != PixelMode::PilExact) {
    throw std::invalid_argument("ppm: only PilExact images can be encoded");
  }
  char header[64];
  const int n = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n",
                              img.width, img.height);
  std::vector<std::uint8_t> out(header, header + n);
  out.reserve(out.size() + img.data.size());
  for (double v : img.data) {
    if (v < 0.0 || v > 255.0 || v != std::floor(v)) {
      throw std::invalid_argument("ppm: PilExact value out of [0,255] integers");
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

void write_ppm(const Image& img, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_ppm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ppm: cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace patchnorm
