#ifndef PATCHNORM_ECPE_HPP
#define PATCHNORM_ECPE_HPP

#include <cstdint>
#include <vector>

#include "patchnorm/corruptions.hpp"
#include "patchnorm/embedding.hpp"

namespace patchnorm {

// Accumulated ReLU'd gradient mass of the summed early-stage output with
// respect to the positional embedding, over a dataset at one corruption
// factor.
struct EcpeReport {
  Variant variant = Variant::VitStyle;
  double corruption_factor = 1.0;
  std::size_t num_images = 0;
  double ecpe_value = 0.0;
  std::vector<double> per_image_values;
  std::uint64_t seed = 0;
  PixelMode mode = PixelMode::Idealized;
};

// d(sum z)/dE_pos via the LayerNorm backward pass. For VitStyle the
// gradient flows through the single post-LN; for SwinStyle only through
// the outer LN (E_pos enters after the inner one).
Matrix grad_epos_analytic(const Matrix& patches, const EarlyStageConfig& cfg);

// Central-difference estimate, one forward pair per element. h must be
// in [1e-7, 1e-3].
Matrix grad_epos_fd(const Matrix& patches, const EarlyStageConfig& cfg,
                    double h);

EcpeReport ecpe_accumulate(const std::vector<Image>& images, double factor,
                           const EarlyStageConfig& cfg, PixelMode mode,
                           std::uint64_t seed);

double relu_sum(const Matrix& m);

}  // namespace patchnorm

#endif  // PATCHNORM_ECPE_HPP
