#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "patchnorm/embedding.hpp"

using namespace patchnorm;

namespace {

Image uniform_image(int size, double value, PixelMode mode) {
  return Image(size, size, mode, value);
}

Matrix pixel_scale_patches(std::size_t n, std::size_t d, std::uint64_t seed) {
  return mat_random_uniform(n, d, -128.0, 128.0, seed);
}

}  // namespace

TEST_CASE("patchify shape") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 224, 16, 64, 3);
  const Image img(224, 224, PixelMode::PilExact, 0.0);
  const Matrix p = patchify(img, cfg);
  CHECK(p.rows() == 196);
  CHECK(p.cols() == 64);
}

TEST_CASE("patchify of zero image is zero") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 64, 16, 32, 3);
  const Matrix p = patchify(uniform_image(64, 0.0, PixelMode::PilExact), cfg);
  CHECK(frobenius_norm(p) == doctest::Approx(0.0));
}

TEST_CASE("patchify is linear in the image") {
  EarlyStageConfig cfg = make_random_config(Variant::VitStyle, 64, 16, 32, 5,
                                            /*centered=*/false);
  Image img(64, 64, PixelMode::Idealized);
  UniformRng rng(11);
  for (double& v : img.data) v = rng.next(0.0, 255.0);

  Image scaled = img;
  for (double& v : scaled.data) v *= 3.5;

  const Matrix p1 = scale_shift(patchify(img, cfg), 3.5, 0.0);
  const Matrix p2 = patchify(scaled, cfg);
  CHECK(max_abs_diff(p1, p2) / frobenius_norm(p1) < 1e-12);
}

TEST_CASE("patchify rejects non-divisible dims") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 64, 16, 32, 3);
  const Image img(60, 64, PixelMode::PilExact, 0.0);
  CHECK_THROWS_AS(patchify(img, cfg), std::invalid_argument);
}

TEST_CASE("ln_normalize matches scalar arithmetic") {
  const Matrix x(1, 3, {1.0, 2.0, 3.0});
  const Matrix n = ln_normalize(x, 1e-15);  // near the eps->0 limit
  CHECK(n(0, 0) == doctest::Approx(-1.224744871).epsilon(1e-6));
  CHECK(n(0, 1) == doctest::Approx(0.0));
  CHECK(n(0, 2) == doctest::Approx(1.224744871).epsilon(1e-6));
}

TEST_CASE("ln_normalize zero-variance row maps to zeros") {
  const Matrix x(1, 3, {5.0, 5.0, 5.0});
  const Matrix n = ln_normalize(x, 1e-5);
  for (double v : n.data()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("ln_normalize scale-bias invariance at pixel scale") {
  // Holds to the stated tolerance because sampled rows have variance in
  // the thousands; eps=1e-5 drift scales as eps/var.
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix x = pixel_scale_patches(8, 64, 100 + trial);
    const Matrix base = ln_normalize(x, 1e-5);
    for (double a : {0.5, 2.0, 5.0}) {
      for (double b : {-1.0, 0.0, 3.0}) {
        const Matrix other = ln_normalize(scale_shift(x, a, b), 1e-5);
        CHECK(max_abs_diff(base, other) < 1e-6);
      }
    }
  }
}

TEST_CASE("ln_affine") {
  LayerNormParams p;
  p.gamma = {2.0, 3.0};
  p.beta = {1.0, 1.0};
  const Matrix x(1, 2, {1.0, -1.0});
  const Matrix y = ln_affine(x, p);
  CHECK(y(0, 0) == doctest::Approx(3.0));
  CHECK(y(0, 1) == doctest::Approx(-2.0));

  p.gamma = {1.0, 1.0};
  p.beta = {0.0, 0.0};
  const Matrix ident = ln_affine(x, p);
  CHECK(max_abs_diff(ident, x) == doctest::Approx(0.0));

  LayerNormParams bad;
  bad.gamma = {1.0};
  bad.beta = {0.0};
  CHECK_THROWS_AS(ln_affine(x, bad), std::invalid_argument);
}

TEST_CASE("swin early stage is scale/bias invariant") {
  const EarlyStageConfig cfg = make_matrix_config(Variant::SwinStyle, 16, 64, 21);
  const Matrix x = pixel_scale_patches(16, 64, 22);
  const Matrix z = early_stage_forward(x, cfg);
  const Matrix z2 = early_stage_forward(scale_shift(x, 1.7, -40.0), cfg);
  CHECK(max_abs_diff(z, z2) / frobenius_norm(z) < 1e-8);
}

TEST_CASE("vit with zero pos embed absorbs pure scaling") {
  EarlyStageConfig cfg = make_matrix_config(Variant::VitStyle, 16, 64, 31);
  cfg.pos_embed = Matrix(16, 64, 0.0);
  const Matrix x = pixel_scale_patches(16, 64, 32);
  CHECK(consistency_gap(x, {2.0, 0.0}, cfg) < 1e-8);
}

TEST_CASE("vit with generic pos embed is inconsistent under scaling") {
  const EarlyStageConfig cfg = make_matrix_config(Variant::VitStyle, 16, 64, 41);
  const Matrix x = mat_random_uniform(16, 64, -2.0, 2.0, 42);
  CHECK(consistency_gap(x, {2.0, 0.0}, cfg) > 1e-2);
}

TEST_CASE("consistency_gap identity is zero") {
  const EarlyStageConfig cfg = make_matrix_config(Variant::VitStyle, 8, 32, 51);
  const Matrix x = pixel_scale_patches(8, 32, 52);
  CHECK(consistency_gap(x, {1.0, 0.0}, cfg) == doctest::Approx(0.0));
}

TEST_CASE("consistency_gap rejects a=0") {
  const EarlyStageConfig cfg = make_matrix_config(Variant::VitStyle, 8, 32, 51);
  const Matrix x = pixel_scale_patches(8, 32, 52);
  CHECK_THROWS_AS(consistency_gap(x, {0.0, 0.0}, cfg), std::invalid_argument);
}

TEST_CASE("constant-row patches survive the eps path") {
  const EarlyStageConfig cfg = make_matrix_config(Variant::SwinStyle, 4, 16, 61);
  const Matrix x(4, 16, 7.25);  // every row constant, variance zero
  const Matrix z = early_stage_forward(x, cfg);
  for (double v : z.data()) CHECK(std::isfinite(v));
}

TEST_CASE("config validation") {
  EarlyStageConfig cfg = make_matrix_config(Variant::SwinStyle, 4, 16, 71);
  cfg.pre_ln.reset();  // SwinStyle without pre_ln is malformed
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
