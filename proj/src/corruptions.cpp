#include "patchnorm/corruptions.hpp"

#include <cmath>
#include <stdexcept>

namespace patchnorm {

namespace {

constexpr double kGrayR = 0.299;
constexpr double kGrayG = 0.587;
constexpr double kGrayB = 0.114;

// Half-to-even rounding; relies on the default FE_TONEAREST mode.
double round_even(double v) { return std::nearbyint(v); }

double clamp255(double v) { return v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v); }

double quantize(double v, PixelMode mode) {
  return mode == PixelMode::PilExact ? clamp255(round_even(v)) : v;
}

}  // namespace

double gray_mean(const Image& img) {
  double sum = 0.0;
  for (std::size_t i = 0; i < img.num_pixels(); ++i) {
    double lum = kGrayR * img.data[i * 3] + kGrayG * img.data[i * 3 + 1] +
                 kGrayB * img.data[i * 3 + 2];
    if (img.mode == PixelMode::PilExact) lum = round_even(lum);
    sum += lum;
  }
  double mean = sum / static_cast<double>(img.num_pixels());
  if (img.mode == PixelMode::PilExact) mean = round_even(mean);
  return mean;
}

Image enhance(const Image& img, const CorruptionSpec& spec) {
  if (spec.kind != CorruptionKind::Contrast &&
      spec.kind != CorruptionKind::Brightness) {
    throw std::invalid_argument("enhance: kind must be Contrast or Brightness");
  }
  if (spec.factor < 0.0) {
    throw std::invalid_argument("enhance: factor must be >= 0");
  }

  double deg[3] = {0.0, 0.0, 0.0};
  if (spec.kind == CorruptionKind::Contrast) {
    if (spec.degenerate == DegenerateKind::GrayMean) {
      deg[0] = deg[1] = deg[2] = gray_mean(img);
    } else {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < img.num_pixels(); ++i) {
          sum += img.data[i * 3 + c];
        }
        deg[c] = sum / static_cast<double>(img.num_pixels());
        if (img.mode == PixelMode::PilExact) deg[c] = round_even(deg[c]);
      }
    }
  }

  Image out = img;
  out.mode = spec.mode;
  for (std::size_t i = 0; i < img.num_pixels(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v = deg[c] + spec.factor * (img.data[i * 3 + c] - deg[c]);
      out.data[i * 3 + c] = quantize(v, spec.mode);
    }
  }
  return out;
}

Image gamma_correct(const Image& img, double g, PixelMode mode) {
  if (g <= 0.0) throw std::invalid_argument("gamma: g must be > 0");
  Image out = img;
  out.mode = mode;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double base = std::max(img.data[i], 0.0) / 255.0;
    out.data[i] = quantize(255.0 * std::pow(base, g), mode);
  }
  return out;
}

namespace {

double sample_bilinear(const Image& img, double sy, double sx, int c) {
  // sy/sx are continuous coordinates in pixel-center space.
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0;
  const double fy = sy - y0;
  auto cl = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
  const int x0c = cl(x0, img.width), x1c = cl(x0 + 1, img.width);
  const int y0c = cl(y0, img.height), y1c = cl(y0 + 1, img.height);
  const double top = (1.0 - fx) * img.at(y0c, x0c, c) + fx * img.at(y0c, x1c, c);
  const double bot = (1.0 - fx) * img.at(y1c, x0c, c) + fx * img.at(y1c, x1c, c);
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace

Image resize_short_side(const Image& img, int target) {
  if (target < 1) throw std::invalid_argument("resize: target must be >= 1");
  const int short_side = std::min(img.width, img.height);
  const double scale = static_cast<double>(target) / short_side;
  const int nw = img.width == short_side
                     ? target
                     : static_cast<int>(std::lround(img.width * scale));
  const int nh = img.height == short_side
                     ? target
                     : static_cast<int>(std::lround(img.height * scale));

  Image out(nw, nh, img.mode);
  const double sx_scale = static_cast<double>(img.width) / nw;
  const double sy_scale = static_cast<double>(img.height) / nh;
  for (int y = 0; y < nh; ++y) {
    const double sy = (y + 0.5) * sy_scale - 0.5;
    for (int x = 0; x < nw; ++x) {
      const double sx = (x + 0.5) * sx_scale - 0.5;
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = quantize(sample_bilinear(img, sy, sx, c), img.mode);
      }
    }
  }
  return out;
}

Image translate_crop(const Image& img, int s, int short_side, int crop) {
  if (s < 0) throw std::invalid_argument("translate_crop: s must be >= 0");
  const Image tpl = resize_short_side(img, short_side);
  const int x0 = (tpl.width - crop) / 2 + s;
  const int y0 = (tpl.height - crop) / 2 + s;
  if (x0 < 0 || y0 < 0 || x0 + crop > tpl.width || y0 + crop > tpl.height) {
    throw std::out_of_range("translate_crop: shifted window exceeds template");
  }
  Image out(crop, crop, tpl.mode);
  for (int y = 0; y < crop; ++y) {
    for (int x = 0; x < crop; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = tpl.at(y0 + y, x0 + x, c);
      }
    }
  }
  return out;
}

Image rotate(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  const double rad = degrees * M_PI / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;

  Image out(img.width, img.height, img.mode);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      // Inverse mapping; out-of-source samples clamp to the edge.
      const double sx = cs * dx + sn * dy + cx;
      const double sy = -sn * dx + cs * dy + cy;
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = quantize(sample_bilinear(img, sy, sx, c), img.mode);
      }
    }
  }
  return out;
}

Image apply_corruption(const Image& img, CorruptionKind kind, double factor,
                       PixelMode mode, int translate_short,
                       int translate_window) {
  Image input = img;
  if (mode == PixelMode::Idealized) input.mode = PixelMode::Idealized;
  switch (kind) {
    case CorruptionKind::Contrast:
    case CorruptionKind::Brightness: {
      CorruptionSpec spec;
      spec.kind = kind;
      spec.factor = factor;
      spec.mode = mode;
      return enhance(input, spec);
    }
    case CorruptionKind::Gamma:
      return gamma_correct(input, factor, mode);
    case CorruptionKind::Translation:
      return translate_crop(input, static_cast<int>(factor), translate_short,
                            translate_window);
    case CorruptionKind::Rotation:
      return rotate(input, factor);
  }
  throw std::invalid_argument("apply_corruption: unknown kind");
}

}  // namespace patchnorm
