#include "patchnorm/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace patchnorm {

LayerNormParams LayerNormParams::identity(std::size_t dim, double epsilon) {
  LayerNormParams p;
  p.gamma.assign(dim, 1.0);
  p.beta.assign(dim, 0.0);
  p.epsilon = epsilon;
  return p;
}

void EarlyStageConfig::validate() const {
  const std::size_t flat = static_cast<std::size_t>(patch_size) * patch_size * 3;
  if (proj_weights.rows() != flat || proj_weights.cols() != embed_dim) {
    throw std::invalid_argument("EarlyStageConfig: proj_weights shape mismatch");
  }
  if (proj_bias.size() != embed_dim) {
    throw std::invalid_argument("EarlyStageConfig: proj_bias length mismatch");
  }
  if (pos_embed.cols() != embed_dim) {
    throw std::invalid_argument("EarlyStageConfig: pos_embed cols != embed_dim");
  }
  const bool swin = variant == Variant::SwinStyle;
  if (swin != pre_ln.has_value()) {
    throw std::invalid_argument(
        "EarlyStageConfig: pre_ln present iff SwinStyle");
  }
  if (post_ln.gamma.size() != embed_dim || post_ln.beta.size() != embed_dim) {
    throw std::invalid_argument("EarlyStageConfig: post_ln length mismatch");
  }
  if (post_ln.epsilon <= 0.0 || (swin && pre_ln->epsilon <= 0.0)) {
    throw std::invalid_argument("EarlyStageConfig: epsilon must be > 0");
  }
}

EarlyStageConfig make_random_config(Variant variant, int image_size,
                                    int patch_size, std::size_t embed_dim,
                                    std::uint64_t seed, bool centered,
                                    double epsilon) {
  if (image_size % patch_size != 0) {
    throw std::invalid_argument("make_random_config: size not divisible");
  }
  const std::size_t flat = static_cast<std::size_t>(patch_size) * patch_size * 3;
  const std::size_t per_side = static_cast<std::size_t>(image_size / patch_size);
  const std::size_t n = per_side * per_side;
  const double w_half = 1.0 / std::sqrt(static_cast<double>(flat));

  EarlyStageConfig cfg;
  cfg.variant = variant;
  cfg.patch_size = patch_size;
  cfg.embed_dim = embed_dim;
  cfg.proj_weights = mat_random_uniform(flat, embed_dim, -w_half, w_half, seed);
  if (centered) {
    for (std::size_t d = 0; d < embed_dim; ++d) {
      double mu = 0.0;
      for (std::size_t k = 0; k < flat; ++k) mu += cfg.proj_weights(k, d);
      mu /= static_cast<double>(flat);
      for (std::size_t k = 0; k < flat; ++k) cfg.proj_weights(k, d) -= mu;
    }
  }
  cfg.proj_bias.assign(embed_dim, 0.0);
  cfg.pos_embed = mat_random_uniform(n, embed_dim, -16.0, 16.0, seed + 1);

  UniformRng rng(seed + 2);
  auto random_ln = [&](double eps) {
    LayerNormParams p;
    p.gamma.resize(embed_dim);
    p.beta.resize(embed_dim);
    for (double& g : p.gamma) g = rng.next(0.5, 1.5);
    for (double& b : p.beta) b = rng.next(-0.5, 0.5);
    p.epsilon = eps;
    return p;
  };
  if (variant == Variant::SwinStyle) cfg.pre_ln = random_ln(epsilon);
  cfg.post_ln = random_ln(epsilon);
  cfg.validate();
  return cfg;
}

EarlyStageConfig make_matrix_config(Variant variant, std::size_t n,
                                    std::size_t d, std::uint64_t seed,
                                    double epsilon) {
  EarlyStageConfig cfg;
  cfg.variant = variant;
  cfg.patch_size = 1;
  cfg.embed_dim = d;
  cfg.proj_weights = Matrix(3, d);
  cfg.proj_bias.assign(d, 0.0);
  cfg.pos_embed = mat_random_uniform(n, d, -1.0, 1.0, seed);

  UniformRng rng(seed + 1);
  auto random_ln = [&] {
    LayerNormParams p;
    p.gamma.resize(d);
    p.beta.resize(d);
    for (double& g : p.gamma) g = rng.next(0.5, 1.5);
    for (double& b : p.beta) b = rng.next(-0.5, 0.5);
    p.epsilon = epsilon;
    return p;
  };
  if (variant == Variant::SwinStyle) cfg.pre_ln = random_ln();
  cfg.post_ln = random_ln();
  cfg.validate();
  return cfg;
}

Matrix patchify(const Image& img, const EarlyStageConfig& cfg) {
  const int p = cfg.patch_size;
  if (img.width % p != 0 || img.height % p != 0) {
    throw std::invalid_argument("patchify: image dims not divisible by patch");
  }
  const int px = img.width / p;
  const int py = img.height / p;
  const std::size_t flat = static_cast<std::size_t>(p) * p * 3;
  if (cfg.proj_weights.rows() != flat) {
    throw std::invalid_argument("patchify: proj_weights does not match patch");
  }
  const std::size_t n = static_cast<std::size_t>(px) * py;
  Matrix flat_patches(n, flat);
  std::size_t row = 0;
  for (int gy = 0; gy < py; ++gy) {
    for (int gx = 0; gx < px; ++gx, ++row) {
      std::size_t k = 0;
      for (int y = 0; y < p; ++y) {
        for (int x = 0; x < p; ++x) {
          for (int c = 0; c < 3; ++c, ++k) {
            flat_patches(row, k) = img.at(gy * p + y, gx * p + x, c);
          }
        }
      }
    }
  }
  Matrix out = matmul(flat_patches, cfg.proj_weights);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t d = 0; d < out.cols(); ++d) out(r, d) += cfg.proj_bias[d];
  }
  return out;
}

Matrix ln_normalize(const Matrix& x, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("ln_normalize: epsilon <= 0");
  const RowStats stats = row_mean_var(x);
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double inv = 1.0 / std::sqrt(stats.var[r] + epsilon);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = (x(r, c) - stats.mean[r]) * inv;
    }
  }
  return out;
}

Matrix ln_affine(const Matrix& x, const LayerNormParams& p) {
  if (x.cols() != p.gamma.size() || x.cols() != p.beta.size()) {
    throw std::invalid_argument("ln_affine: parameter length mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = p.gamma[c] * x(r, c) + p.beta[c];
    }
  }
  return out;
}

Matrix early_stage_forward(const Matrix& patches, const EarlyStageConfig& cfg) {
  if (patches.rows() != cfg.pos_embed.rows() ||
      patches.cols() != cfg.pos_embed.cols()) {
    throw std::invalid_argument("early_stage_forward: patches/pos_embed shape");
  }
  Matrix tokens = patches;
  if (cfg.variant == Variant::SwinStyle) {
    tokens = ln_affine(ln_normalize(tokens, cfg.pre_ln->epsilon), *cfg.pre_ln);
  }
  tokens = tokens + cfg.pos_embed;
  return ln_affine(ln_normalize(tokens, cfg.post_ln.epsilon), cfg.post_ln);
}

double consistency_gap(const Matrix& patches, const ScaleBias& sb,
                       const EarlyStageConfig& cfg) {
  if (sb.a == 0.0) throw std::invalid_argument("consistency_gap: a must be nonzero");
  const Matrix z0 = early_stage_forward(patches, cfg);
  const Matrix z1 = early_stage_forward(scale_shift(patches, sb.a, sb.b), cfg);
  const double base = std::max(frobenius_norm(z0), 1e-300);
  return frobenius_norm(z1 - z0) / base;
}

Image apply_scale_bias(const Image& img, double a,
                       const std::vector<double>& b_per_channel) {
  if (b_per_channel.size() != 1 && b_per_channel.size() != 3) {
    throw std::invalid_argument("apply_scale_bias: b must have length 1 or 3");
  }
  Image out = img;
  out.mode = PixelMode::Idealized;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double b =
            b_per_channel.size() == 1 ? b_per_channel[0] : b_per_channel[c];
        out.at(y, x, c) = a * img.at(y, x, c) + b;
      }
    }
  }
  return out;
}

}  // namespace patchnorm
