#ifndef PATCHNORM_IMAGE_HPP
#define PATCHNORM_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace patchnorm {

// PilExact: values are integers in [0,255] (stored as double).
// Idealized: values are arbitrary finite reals; no rounding or clamping.
enum class PixelMode { Idealized, PilExact };

// RGB raster, row-major, channel index fastest: data[(y*width + x)*3 + c].
struct Image {
  int width = 0;
  int height = 0;
  PixelMode mode = PixelMode::PilExact;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, PixelMode m, double fill = 0.0)
      : width(w), height(h), mode(m),
        data(static_cast<std::size_t>(w) * h * 3, fill) {}

  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::size_t num_pixels() const {
    return static_cast<std::size_t>(width) * height;
  }
};

// Binary PPM (P6, maxval 255).
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);
std::vector<std::uint8_t> encode_ppm(const Image& img);

}  // namespace patchnorm

#endif  // PATCHNORM_IMAGE_HPP
