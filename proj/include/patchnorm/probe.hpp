#ifndef PATCHNORM_PROBE_HPP
#define PATCHNORM_PROBE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "patchnorm/corruptions.hpp"
#include "patchnorm/embedding.hpp"

namespace patchnorm {

enum class FeatureReduction { MeanPoolRows, Flatten };

// Multinomial logistic readout over frozen early-stage features.
struct ProbeModel {
  Matrix weights;  // feature_dim x num_classes
  std::vector<double> bias;
  FeatureReduction reduction = FeatureReduction::MeanPoolRows;
  double final_loss = 0.0;
};

struct ProbeTrainConfig {
  double lr = 0.5;
  std::size_t epochs = 400;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

struct SweepResult {
  CorruptionKind corruption = CorruptionKind::Contrast;
  std::vector<double> factors;
  std::vector<double> accuracy;
  Variant variant = Variant::VitStyle;
  std::size_t num_test = 0;
  std::uint64_t seed = 0;
  PixelMode mode = PixelMode::PilExact;
  std::vector<std::vector<std::size_t>> predictions;  // per factor
};

std::vector<double> extract_features(const Image& img,
                                     const EarlyStageConfig& cfg,
                                     FeatureReduction reduction);

// Full-batch gradient descent on softmax cross-entropy + L2. Weights
// start at zero, so training is deterministic given the data order.
ProbeModel train_probe(const std::vector<std::vector<double>>& features,
                       const std::vector<std::size_t>& labels,
                       std::size_t num_classes, const ProbeTrainConfig& config);

std::size_t predict(const ProbeModel& model, const std::vector<double>& feature);

// For each factor: corrupt every test image, extract features, classify.
// `factors` must contain the identity factor (1 for enhancements, 0 for
// translation/rotation). Translation windows use short_side/crop sized
// for the pipeline's image size.
SweepResult run_sweep(const std::vector<Image>& test_images,
                      const std::vector<std::size_t>& test_labels,
                      const ProbeModel& probe, const EarlyStageConfig& cfg,
                      CorruptionKind kind, const std::vector<double>& factors,
                      PixelMode mode, std::uint64_t seed);

// Flat binary of float64 values preceded by a one-line JSON header.
void save_probe(const ProbeModel& model, const std::string& path);
ProbeModel load_probe(const std::string& path);

}  // namespace patchnorm

#endif  // PATCHNORM_PROBE_HPP
