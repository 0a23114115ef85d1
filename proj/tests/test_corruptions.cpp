#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "patchnorm/corruptions.hpp"
#include "patchnorm/embedding.hpp"
#include "patchnorm/matrix.hpp"

using namespace patchnorm;

namespace {

Image test_card(int w, int h, std::uint64_t seed) {
  Image img(w, h, PixelMode::PilExact);
  UniformRng rng(seed);
  for (double& v : img.data) v = std::floor(rng.next(0.0, 256.0));
  return img;
}

bool same_bytes(const Image& a, const Image& b) {
  return a.width == b.width && a.height == b.height && a.data == b.data;
}

std::vector<std::uint8_t> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("enhance factor 1 is the identity, bit exact") {
  const Image img = test_card(20, 14, 1);
  for (CorruptionKind kind :
       {CorruptionKind::Contrast, CorruptionKind::Brightness}) {
    const Image out = enhance(img, {kind, 1.0, PixelMode::PilExact});
    CHECK(same_bytes(img, out));
  }
}

TEST_CASE("contrast factor 0 collapses to the gray mean") {
  const Image img = test_card(16, 16, 2);
  const double mean = gray_mean(img);
  const Image out = enhance(img, {CorruptionKind::Contrast, 0.0, PixelMode::PilExact});
  for (double v : out.data) CHECK(v == mean);
}

TEST_CASE("brightness factor 5 saturates above input 51") {
  Image strip(256, 1, PixelMode::PilExact);
  for (int x = 0; x < 256; ++x) {
    for (int c = 0; c < 3; ++c) strip.at(0, x, c) = x;
  }
  const Image out =
      enhance(strip, {CorruptionKind::Brightness, 5.0, PixelMode::PilExact});
  for (int x = 0; x <= 51; ++x) CHECK(out.at(0, x, 0) == 5.0 * x);
  for (int x = 52; x < 256; ++x) CHECK(out.at(0, x, 0) == 255.0);
}

TEST_CASE("negative enhancement factor is rejected") {
  const Image img = test_card(8, 8, 3);
  CHECK_THROWS_AS(
      enhance(img, {CorruptionKind::Brightness, -0.5, PixelMode::PilExact}),
      std::invalid_argument);
}

TEST_CASE("idealized enhancement composes affinely") {
  Image img = test_card(12, 12, 4);
  img.mode = PixelMode::Idealized;
  const double d = gray_mean(img);
  const Image once = enhance(img, {CorruptionKind::Contrast, 2.0, PixelMode::Idealized});
  // Second blend about the same degenerate: shift so the anchor matches.
  Image expected = img;
  for (double& v : expected.data) v = d + 6.0 * ((v - d));
  Image twice = once;
  for (double& v : twice.data) v = d + 3.0 * (v - d);
  for (std::size_t i = 0; i < expected.data.size(); ++i) {
    CHECK(twice.data[i] == doctest::Approx(expected.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("pil-exact output is integer valued in range") {
  const Image img = test_card(10, 10, 5);
  const Image out = enhance(img, {CorruptionKind::Contrast, 3.7, PixelMode::PilExact});
  for (double v : out.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
    CHECK(v == std::floor(v));
  }
}

TEST_CASE("gamma identity and endpoints") {
  const Image img = test_card(9, 9, 6);
  CHECK(same_bytes(img, gamma_correct(img, 1.0, PixelMode::PilExact)));

  Image probe(3, 1, PixelMode::PilExact);
  probe.at(0, 0, 0) = 0;
  probe.at(0, 1, 0) = 128;
  probe.at(0, 2, 0) = 255;
  const Image out = gamma_correct(probe, 2.0, PixelMode::PilExact);
  CHECK(out.at(0, 0, 0) == 0.0);
  CHECK(out.at(0, 1, 0) == 64.0);  // round(255*(128/255)^2)
  CHECK(out.at(0, 2, 0) == 255.0);
  CHECK_THROWS_AS(gamma_correct(img, 0.0, PixelMode::PilExact),
                  std::invalid_argument);
}

TEST_CASE("translate_crop s=0 equals the center crop") {
  const Image img = test_card(300, 260, 7);
  const Image tpl = resize_short_side(img, 256);
  const Image centered = translate_crop(img, 0);
  CHECK(centered.width == 224);
  CHECK(centered.height == 224);
  const int x0 = (tpl.width - 224) / 2;
  const int y0 = (tpl.height - 224) / 2;
  for (int y = 0; y < 224; ++y) {
    for (int x = 0; x < 224; ++x) {
      for (int c = 0; c < 3; ++c) {
        CHECK(centered.at(y, x, c) == tpl.at(y0 + y, x0 + x, c));
      }
    }
  }
}

TEST_CASE("translate_crop window arithmetic") {
  // 340x256 source stays 340x256 after resize; shifted window top-left
  // moves by (+16, +16) from the center position.
  const Image img = test_card(340, 256, 8);
  const Image tpl = resize_short_side(img, 256);
  REQUIRE(tpl.width == 340);
  const Image shifted = translate_crop(img, 16);
  const int x0 = (340 - 224) / 2 + 16;
  const int y0 = (256 - 224) / 2 + 16;
  for (int y = 0; y < 224; y += 7) {
    for (int x = 0; x < 224; x += 7) {
      CHECK(shifted.at(y, x, 0) == tpl.at(y0 + y, x0 + x, 0));
    }
  }
}

TEST_CASE("translate_crop rejects windows beyond the template") {
  const Image img = test_card(256, 256, 9);
  CHECK_NOTHROW(translate_crop(img, 16));
  CHECK_THROWS_AS(translate_crop(img, 17), std::out_of_range);
  CHECK_THROWS_AS(translate_crop(img, -1), std::invalid_argument);
}

TEST_CASE("rotation identities") {
  const Image img = test_card(32, 32, 10);
  CHECK(same_bytes(img, rotate(img, 0.0)));

  Image smooth(32, 32, PixelMode::Idealized);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) smooth.at(y, x, c) = 2.0 * x + 3.0 * y + c;
    }
  }
  const Image full_turn = rotate(smooth, 360.0);
  for (std::size_t i = 0; i < smooth.data.size(); ++i) {
    CHECK(std::fabs(full_turn.data[i] - smooth.data[i]) < 1e-6);
  }
}

TEST_CASE("90 degree rotation matches the index permutation") {
  // Two-tone square: left half dark, right half light.
  const int n = 16;
  Image img(n, n, PixelMode::PilExact);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = x < n / 2 ? 40.0 : 200.0;
    }
  }
  const Image rot = rotate(img, 90.0);
  // Quarter-turn index permutation: dst(y,x) = src(n-1-x, y).
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      CHECK(rot.at(y, x, 0) == img.at(n - 1 - x, y, 0));
    }
  }
}

TEST_CASE("contrast commutes with patchify in the aX+b model") {
  EarlyStageConfig cfg = make_random_config(Variant::VitStyle, 48, 16, 32, 11,
                                            /*centered=*/false);
  Image img = test_card(48, 48, 12);
  img.mode = PixelMode::Idealized;
  const double d = gray_mean(img);
  const double f = 2.5;

  const Image corrupted = enhance(img, {CorruptionKind::Contrast, f, PixelMode::Idealized});
  const Matrix lhs = patchify(corrupted, cfg);

  const Image bias_img(48, 48, PixelMode::Idealized, (1.0 - f) * d);
  const Matrix rhs =
      scale_shift(patchify(img, cfg), f, 0.0) + patchify(bias_img, cfg);
  CHECK(max_abs_diff(lhs, rhs) / std::max(frobenius_norm(lhs), 1.0) < 1e-9);
}

TEST_CASE("golden fixtures match byte for byte") {
  const std::string dir = PATCHNORM_GOLDEN_DIR;
  const Image card = read_ppm(dir + "/card.ppm");
  struct Fixture {
    CorruptionKind kind;
    double factor;
    const char* name;
  };
  const Fixture fixtures[] = {
      {CorruptionKind::Contrast, 0.0, "contrast_0"},
      {CorruptionKind::Contrast, 0.5, "contrast_0.5"},
      {CorruptionKind::Contrast, 1.0, "contrast_1"},
      {CorruptionKind::Contrast, 2.0, "contrast_2"},
      {CorruptionKind::Contrast, 5.0, "contrast_5"},
      {CorruptionKind::Brightness, 0.0, "brightness_0"},
      {CorruptionKind::Brightness, 0.5, "brightness_0.5"},
      {CorruptionKind::Brightness, 1.0, "brightness_1"},
      {CorruptionKind::Brightness, 2.0, "brightness_2"},
      {CorruptionKind::Brightness, 5.0, "brightness_5"},
  };
  for (const Fixture& f : fixtures) {
    const Image out = enhance(card, {f.kind, f.factor, PixelMode::PilExact});
    CHECK(encode_ppm(out) ==
          file_bytes(dir + "/" + std::string(f.name) + ".ppm"));
  }
  for (double g : {0.5, 1.0, 2.0, 5.0}) {
    const Image out = gamma_correct(card, g, PixelMode::PilExact);
    char name[32];
    std::snprintf(name, sizeof(name), "/gamma_%g.ppm", g);
    CHECK(encode_ppm(out) == file_bytes(dir + name));
  }
}
