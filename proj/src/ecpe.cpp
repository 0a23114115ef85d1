#include "patchnorm/ecpe.hpp"

#include <cmath>
#include <stdexcept>

namespace patchnorm {

Matrix grad_epos_analytic(const Matrix& patches, const EarlyStageConfig& cfg) {
  Matrix tokens = patches;
  if (cfg.variant == Variant::SwinStyle) {
    tokens = ln_affine(ln_normalize(tokens, cfg.pre_ln->epsilon), *cfg.pre_ln);
  }
  const Matrix v = tokens + cfg.pos_embed;  // input of the outer LN
  const RowStats stats = row_mean_var(v);
  const LayerNormParams& p = cfg.post_ln;
  const std::size_t d = v.cols();
  const double inv_d = 1.0 / static_cast<double>(d);

  // Z = sum z, so the upstream gradient is all-ones and g_hat = gamma.
  double ghat_mean = 0.0;
  for (double g : p.gamma) ghat_mean += g;
  ghat_mean *= inv_d;

  Matrix grad(v.rows(), d);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double inv_std = 1.0 / std::sqrt(stats.var[r] + p.epsilon);
    double gy_mean = 0.0;  // mean(gamma * y_hat) over the row
    for (std::size_t c = 0; c < d; ++c) {
      gy_mean += p.gamma[c] * (v(r, c) - stats.mean[r]) * inv_std;
    }
    gy_mean *= inv_d;
    for (std::size_t c = 0; c < d; ++c) {
      const double yhat = (v(r, c) - stats.mean[r]) * inv_std;
      grad(r, c) = inv_std * (p.gamma[c] - ghat_mean - yhat * gy_mean);
    }
  }
  return grad;
}

Matrix grad_epos_fd(const Matrix& patches, const EarlyStageConfig& cfg,
                    double h) {
  if (h < 1e-7 || h > 1e-3) {
    throw std::invalid_argument("grad_epos_fd: h must be in [1e-7, 1e-3]");
  }
  EarlyStageConfig probe = cfg;
  // Sum z minus the constant beta offsets (same gradient, far less
  // cancellation noise in the central difference), with Kahan
  // compensation.
  auto total = [&]() {
    const Matrix z = early_stage_forward(patches, probe);
    double s = 0.0, comp = 0.0;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t c = 0; c < z.cols(); ++c) {
        const double term = (z(r, c) - cfg.post_ln.beta[c]) - comp;
        const double next = s + term;
        comp = (next - s) - term;
        s = next;
      }
    }
    return s;
  };
  Matrix grad(cfg.pos_embed.rows(), cfg.pos_embed.cols());
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    for (std::size_t c = 0; c < grad.cols(); ++c) {
      const double orig = cfg.pos_embed(r, c);
      probe.pos_embed(r, c) = orig + h;
      const double zp = total();
      probe.pos_embed(r, c) = orig - h;
      const double zm = total();
      probe.pos_embed(r, c) = orig;
      grad(r, c) = (zp - zm) / (2.0 * h);
    }
  }
  return grad;
}

double relu_sum(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) {
    if (v > 0.0) s += v;
  }
  return s;
}

EcpeReport ecpe_accumulate(const std::vector<Image>& images, double factor,
                           const EarlyStageConfig& cfg, PixelMode mode,
                           std::uint64_t seed) {
  if (images.empty()) {
    throw std::invalid_argument("ecpe_accumulate: dataset is empty");
  }
  if (factor <= 0.0) {
    throw std::invalid_argument("ecpe_accumulate: factor must be > 0");
  }
  EcpeReport report;
  report.variant = cfg.variant;
  report.corruption_factor = factor;
  report.num_images = images.size();
  report.seed = seed;
  report.mode = mode;
  report.per_image_values.reserve(images.size());

  CorruptionSpec spec;
  spec.kind = CorruptionKind::Contrast;
  spec.factor = factor;
  spec.mode = mode;

  for (const Image& img : images) {
    const Image corrupted = enhance(img, spec);
    const Matrix patches = patchify(corrupted, cfg);
    report.per_image_values.push_back(
        relu_sum(grad_epos_analytic(patches, cfg)));
  }
  for (double v : report.per_image_values) report.ecpe_value += v;
  return report;
}

}  // namespace patchnorm
