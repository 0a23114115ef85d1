#ifndef PATCHNORM_EMBEDDING_HPP
#define PATCHNORM_EMBEDDING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "patchnorm/image.hpp"
#include "patchnorm/matrix.hpp"

namespace patchnorm {

enum class Variant { VitStyle, SwinStyle };

// Per-channel affine of LayerNorm (the L step), plus the variance
// stabilizer used by the paired normalization (the N step).
struct LayerNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  double epsilon = 1e-5;

  static LayerNormParams identity(std::size_t dim, double epsilon = 1e-5);
};

// Early-stage pipeline up to and including the first encoder LayerNorm.
// VitStyle:  z = LN_post(X + E_pos)
// SwinStyle: z = LN_post(LN_pre(X) + E_pos)
struct EarlyStageConfig {
  Variant variant = Variant::VitStyle;
  int patch_size = 16;
  std::size_t embed_dim = 64;
  Matrix proj_weights;  // (patch_size^2 * 3) x embed_dim
  std::vector<double> proj_bias;
  Matrix pos_embed;  // N x embed_dim
  std::optional<LayerNormParams> pre_ln;  // present iff SwinStyle
  LayerNormParams post_ln;

  std::size_t num_patches() const { return pos_embed.rows(); }
  void validate() const;
};

struct ScaleBias {
  double a = 1.0;
  double b = 0.0;
};

// Seeded random config for synthetic experiments. Projection weights are
// drawn U[-1/sqrt(3p^2), +1/sqrt(3p^2)]; when `centered` is set each
// weight column is shifted to zero sum, so a uniform pixel shift maps to
// the zero token and pixel-space affine corruption acts as pure scaling
// on the patch matrix. pos_embed ~ U[-16,16], comparable to the token
// magnitude of pixel-scale inputs so the positional term is not
// negligible. gamma ~ U[0.5,1.5], beta ~ U[-0.5,0.5].
EarlyStageConfig make_random_config(Variant variant, int image_size,
                                    int patch_size, std::size_t embed_dim,
                                    std::uint64_t seed, bool centered = true,
                                    double epsilon = 1e-5);

// Config for matrix-level invariance studies: random pos_embed U[-1,1]
// and LayerNorm affines, with a placeholder projection that patchify
// never sees at this level.
EarlyStageConfig make_matrix_config(Variant variant, std::size_t n,
                                    std::size_t d, std::uint64_t seed,
                                    double epsilon = 1e-5);

// Flatten each patch_size x patch_size patch (raster order over patches
// and over pixels, RGB fastest within a pixel) and project: X*W + bias.
Matrix patchify(const Image& img, const EarlyStageConfig& cfg);

// The N step: per-row standardization with 1/sqrt(var + epsilon).
Matrix ln_normalize(const Matrix& x, double epsilon);

// The L step: out[n,d] = gamma[d]*x[n,d] + beta[d].
Matrix ln_affine(const Matrix& x, const LayerNormParams& p);

Matrix early_stage_forward(const Matrix& patches, const EarlyStageConfig& cfg);

// ||z(a*x+b) - z(x)||_F / max(||z(x)||_F, tiny); zero iff the pipeline is
// invariant to the given scale/bias at the patch level.
double consistency_gap(const Matrix& patches, const ScaleBias& sb,
                       const EarlyStageConfig& cfg);

// a*img + b applied in pixel space; b may be per-color-channel.
Image apply_scale_bias(const Image& img, double a,
                       const std::vector<double>& b_per_channel);

}  // namespace patchnorm

#endif  // PATCHNORM_EMBEDDING_HPP
