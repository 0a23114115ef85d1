#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "patchnorm/probe.hpp"
#include "patchnorm/synth.hpp"

using namespace patchnorm;

TEST_CASE("feature shapes") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 96, 16, 64, 3);
  const Image img(96, 96, PixelMode::PilExact, 100.0);
  CHECK(extract_features(img, cfg, FeatureReduction::MeanPoolRows).size() == 64);
  CHECK(extract_features(img, cfg, FeatureReduction::Flatten).size() ==
        36 * 64);
}

TEST_CASE("swin features ignore pixel scale and bias") {
  const EarlyStageConfig cfg = make_random_config(Variant::SwinStyle, 48, 16,
                                                  32, 5, true, 1e-10);
  SynthSpec spec;
  spec.num_images = 9;
  spec.image_size = 48;
  const SynthDataset ds = generate(spec);
  Image img = ds.images[0];
  img.mode = PixelMode::Idealized;
  const Image mapped = apply_scale_bias(img, 2.5, {12.0});

  const auto f1 = extract_features(img, cfg, FeatureReduction::MeanPoolRows);
  const auto f2 = extract_features(mapped, cfg, FeatureReduction::MeanPoolRows);
  for (std::size_t i = 0; i < f1.size(); ++i) {
    CHECK(std::fabs(f1[i] - f2[i]) < 1e-9);
  }
}

TEST_CASE("probe separates a linearly separable toy set") {
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> labels;
  UniformRng rng(9);
  for (int i = 0; i < 40; ++i) {
    const double cls = i % 2 == 0 ? -1.0 : 1.0;
    features.push_back({cls * 2.0 + rng.next(-0.5, 0.5), rng.next(-1.0, 1.0)});
    labels.push_back(i % 2);
  }
  ProbeTrainConfig tc;
  tc.lr = 0.5;
  tc.epochs = 200;
  tc.l2 = 0.0;
  const ProbeModel model = train_probe(features, labels, 2, tc);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (predict(model, features[i]) == labels[i]) ++correct;
  }
  CHECK(correct == features.size());
}

TEST_CASE("lr=0 leaves the zero initialization untouched") {
  ProbeTrainConfig tc;
  tc.lr = 0.0;
  tc.epochs = 10;
  const ProbeModel model =
      train_probe({{1.0, 2.0}, {3.0, 4.0}}, {0, 1}, 2, tc);
  for (double v : model.weights.data()) CHECK(v == 0.0);
  for (double v : model.bias) CHECK(v == 0.0);
}

TEST_CASE("duplicating the dataset does not change the model") {
  std::vector<std::vector<double>> features = {
      {0.2, 1.0}, {0.9, -0.4}, {-1.1, 0.3}, {0.4, 0.8}};
  std::vector<std::size_t> labels = {0, 1, 0, 1};
  std::vector<std::vector<double>> doubled = features;
  doubled.insert(doubled.end(), features.begin(), features.end());
  std::vector<std::size_t> doubled_labels = labels;
  doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());

  ProbeTrainConfig tc;
  tc.lr = 0.3;
  tc.epochs = 150;
  tc.l2 = 1e-3;
  const ProbeModel a = train_probe(features, labels, 2, tc);
  const ProbeModel b = train_probe(doubled, doubled_labels, 2, tc);
  CHECK(max_abs_diff(a.weights, b.weights) < 1e-9);
}

TEST_CASE("run_sweep requires the identity factor") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 48, 16, 32, 5);
  SynthSpec spec;
  spec.num_images = 9;
  spec.image_size = 48;
  const SynthDataset ds = generate(spec);
  ProbeModel model;
  model.weights = Matrix(32, 9);
  model.bias.assign(9, 0.0);
  CHECK_THROWS_AS(run_sweep(ds.images, ds.labels, model, cfg,
                            CorruptionKind::Contrast, {2.0, 3.0},
                            PixelMode::PilExact, 1),
                  std::invalid_argument);
}

TEST_CASE("identity factor reproduces the clean accuracy") {
  const EarlyStageConfig cfg =
      make_random_config(Variant::VitStyle, 48, 16, 32, 6);
  SynthSpec spec;
  spec.num_images = 45;
  spec.image_size = 48;
  spec.seed = 31;
  const SynthDataset ds = generate(spec);

  std::vector<std::vector<double>> features;
  for (const Image& img : ds.images) {
    features.push_back(
        extract_features(img, cfg, FeatureReduction::MeanPoolRows));
  }
  ProbeTrainConfig tc;
  tc.lr = 1.0;
  tc.epochs = 300;
  ProbeModel model = train_probe(features, ds.labels, 9, tc);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (predict(model, features[i]) == ds.labels[i]) ++correct;
  }
  const double clean = static_cast<double>(correct) / features.size();

  const SweepResult sweep =
      run_sweep(ds.images, ds.labels, model, cfg, CorruptionKind::Contrast,
                {1.0, 2.0}, PixelMode::PilExact, 1);
  CHECK(sweep.accuracy[0] == clean);
}

TEST_CASE("probe checkpoint roundtrip") {
  ProbeModel model;
  model.weights = mat_random_uniform(6, 3, -1.0, 1.0, 17);
  model.bias = {0.1, -0.2, 0.3};
  model.final_loss = 0.5;
  const std::string path = "probe_tmp.bin";
  save_probe(model, path);
  const ProbeModel loaded = load_probe(path);
  CHECK(max_abs_diff(model.weights, loaded.weights) == 0.0);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.final_loss == model.final_loss);
  std::filesystem::remove(path);
}
