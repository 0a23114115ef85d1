#ifndef PATCHNORM_CORRUPTIONS_HPP
#define PATCHNORM_CORRUPTIONS_HPP

#include "patchnorm/image.hpp"

namespace patchnorm {

enum class CorruptionKind { Contrast, Brightness, Gamma, Translation, Rotation };

// Degenerate anchor for contrast: mean of the standard grayscale
// conversion (reference imaging-library behavior) or per-color-channel
// means.
enum class DegenerateKind { GrayMean, PerChannelMean };

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::Contrast;
  double factor = 1.0;  // enhancement factor, degrees, or shift pixels
  PixelMode mode = PixelMode::PilExact;
  DegenerateKind degenerate = DegenerateKind::GrayMean;
};

// Blend toward/away from the degenerate image:
//   out = degenerate + factor * (in - degenerate)
// Brightness uses a zero degenerate, contrast the mean-luminance uniform
// image. PilExact rounds half-to-even and clamps to [0,255]; Idealized
// applies the affine map untouched.
Image enhance(const Image& img, const CorruptionSpec& spec);

// out = 255 * (in/255)^g, rounded and clamped in PilExact mode.
Image gamma_correct(const Image& img, double g, PixelMode mode);

// Bilinear resize with half-pixel-centered sampling; short side becomes
// `target` and the other side scales proportionally (rounded).
Image resize_short_side(const Image& img, int target);

// Resize so the short side is `short_side`, then crop a crop x crop
// window whose center is the template center shifted by (+s, +s).
// Windows falling outside the template raise an error; no padding.
Image translate_crop(const Image& img, int s, int short_side = 256,
                     int crop = 224);

// Rotation about the image center, bilinear resampling, edge replication
// for samples outside the source. Output has the input's dimensions.
Image rotate(const Image& img, double degrees);

double gray_mean(const Image& img);  // degenerate level used by contrast

// Dispatch on kind. `factor` is the enhancement factor, gamma exponent,
// shift in pixels, or degrees. Translation windows default to the
// 256/224 protocol; callers with smaller rasters pass their own sizes.
Image apply_corruption(const Image& img, CorruptionKind kind, double factor,
                       PixelMode mode, int translate_short = 256,
                       int translate_window = 224);

}  // namespace patchnorm

#endif  // PATCHNORM_CORRUPTIONS_HPP
